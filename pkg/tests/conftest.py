from types import SimpleNamespace
from typing import Dict, Iterable, Optional

import numpy as np
import pytest

from allocator import PowAllocator
from allocator.commitments import CommitRequest
from config.settings import AttackConfig, ScenarioConfig
from core.blocks import Block, Transaction
from core.chain import Chain, ChainState
from core.ledger import make_genesis
from core.oracle import HashOracle
from core.signatures import SignatureRegistry
from core.validation import ChainValidator


@pytest.fixture
def oracle() -> HashOracle:
    return HashOracle.from_seed(7)


def build_env(distribution: Dict[int, int], pledge: bool = False, seed: int = 7,
              block_reward: int = 0) -> SimpleNamespace:
    oracle = HashOracle.from_seed(seed)
    registry = SignatureRegistry(oracle)
    genesis = Chain.genesis(make_genesis(distribution, pledge=pledge), oracle)
    validator = ChainValidator(oracle, registry, genesis, block_reward)
    return SimpleNamespace(oracle=oracle, registry=registry, genesis=genesis, validator=validator)


@pytest.fixture
def env() -> SimpleNamespace:
    """Генезис с десятью процессами по 10 единиц ресурса."""
    return build_env({p: 10 for p in range(10)})


@pytest.fixture
def make_env():
    return build_env


@pytest.fixture
def extend_chain():
    """Продлевает цепочку неподписанными блоками (для проверок, не зависящих от валидности)."""

    def extend(chain: Chain, oracle: HashOracle, producers: Iterable[int], tag: int = 0,
               txs: Optional[Dict[int, tuple]] = None) -> Chain:
        for producer in producers:
            height = chain.height + 1
            block = Block(parent=chain.digest, txs=(txs or {}).get(height, ()),
                          producer=producer, slot=height * 10 + tag)
            chain = chain.extend(block, oracle)
        return chain

    return extend


@pytest.fixture
def pow_env(env) -> SimpleNamespace:
    """Окружение с PoW-распределителем, у которого почти каждый коммит успешен."""
    env.allocator = PowAllocator(env.oracle, env.validator, 0.5, np.random.default_rng(1))
    return env


@pytest.fixture
def mine_block():
    """Коммитит большой бюджет PoW и возвращает подписанный блок."""

    def mine(env: SimpleNamespace, chain: Chain, producer: int,
             txs: Iterable[Transaction] = (), slot: int = 1) -> Block:
        candidate = Block(parent=chain.digest, txs=tuple(txs), producer=producer, slot=slot)
        response = env.allocator.commit(CommitRequest(producer, ChainState(chain, candidate), 1000, 0))
        assert response.success
        unsigned = candidate.with_commitment(response.proof, None)
        key = env.registry.key_for(producer)
        return unsigned.with_commitment(response.proof, key.sign(unsigned.signing_bytes))

    return mine


@pytest.fixture
def small_config():
    """Небольшой честный сценарий, который прогоняется за секунды."""

    def build(**overrides) -> ScenarioConfig:
        attack = overrides.pop('attack', None) or AttackConfig()
        values = dict(allocator='pow', n_processes=5, total_budget=50, adversary_budget=0,
                      rho=0.004, delta=1, k=4, horizon=300, seeds=[0, 1, 2], tx_interval=5)
        values.update(overrides)
        return ScenarioConfig(**values, attack=attack).resolve()

    return build
