from dataclasses import replace

import pytest

from core.blocks import Block, Transaction, TxKind
from core.chain import Chain, common_ancestor, dump_chain, is_prefix, truncate
from core.ledger import LedgerState, genesis_ledger, make_genesis
from core.oracle import HashOracle, encode_parts
from core.signatures import Signature


class TestOracle:
    def test_same_key_same_answers(self):
        a, b = HashOracle.from_seed(3), HashOracle.from_seed(3)
        assert a.prf('x', 1) == b.prf('x', 1)
        assert a.prf('x', 1) != HashOracle.from_seed(4).prf('x', 1)

    def test_digest_width(self):
        oracle = HashOracle.from_seed(0, bits=32)
        assert 0 <= oracle.prf('a') < 2 ** 32
        assert len(oracle.to_hex(oracle.prf('a'))) == 8
        assert 0.0 <= oracle.unit('a') < 1.0

    def test_rejects_bad_width(self):
        with pytest.raises(ValueError):
            HashOracle(b'k', bits=12)

    def test_encoding_is_unambiguous(self):
        assert encode_parts(['ab', 'c']) != encode_parts(['a', 'bc'])
        assert encode_parts([1]) != encode_parts([True])
        assert encode_parts([None]) != encode_parts([b''])
        assert encode_parts([(1, 2)]) != encode_parts([1, 2])

    def test_encoding_rejects_unknown_types(self):
        with pytest.raises(TypeError):
            encode_parts([1.5])

    def test_below_ratio_edges(self, oracle):
        assert not any(oracle.below_ratio(0, 10, i) for i in range(50))
        assert all(oracle.below_ratio(10, 10, i) for i in range(50))


class TestSignatures:
    def test_verify_only_issued(self, env):
        key = env.registry.key_for(1)
        signature = key.sign(b'msg')
        assert env.registry.verify(1, b'msg', signature)
        assert not env.registry.verify(2, b'msg', signature)
        assert not env.registry.verify(1, b'other', signature)

    def test_forged_signature_rejected(self, env):
        forged = Signature(1, env.oracle.hash(b'msg'))
        assert not env.registry.verify(1, b'msg', forged)
        assert not env.registry.verify(1, b'msg', 'not a signature')


class TestChain:
    def test_heights_and_slices(self, env, extend_chain):
        chain = extend_chain(env.genesis, env.oracle, [1, 2, 3, 4, 5])
        assert chain.height == 5
        assert len(chain) == 6
        assert chain[0] is env.genesis.tip
        assert chain[-1] is chain.tip
        assert chain[:3].height == 2
        assert chain[:3].tip is chain[2]
        assert [block.producer for block in chain.blocks[1:]] == [1, 2, 3, 4, 5]

    def test_invalid_slices(self, env, extend_chain):
        chain = extend_chain(env.genesis, env.oracle, [1, 2])
        with pytest.raises(IndexError):
            chain[1:3]
        with pytest.raises(IndexError):
            chain[:0]
        with pytest.raises(IndexError):
            chain.ancestor(5)

    def test_ancestor_matches_parent_walk(self, env, extend_chain):
        chain = extend_chain(env.genesis, env.oracle, range(37))
        nodes = chain.nodes()
        for height in range(len(chain)):
            assert chain.ancestor(height) is nodes[height]

    def test_ancestor_by_slot(self, env, extend_chain):
        chain = extend_chain(env.genesis, env.oracle, [1, 2, 3, 4])
        # слоты блоков: 10, 20, 30, 40
        assert chain.ancestor_by_slot(25).height == 2
        assert chain.ancestor_by_slot(5).height == 0
        assert chain.ancestor_by_slot(100) is chain

    def test_prefix_relations(self, env, extend_chain):
        base = extend_chain(env.genesis, env.oracle, [1, 2, 3])
        left = extend_chain(base, env.oracle, [4, 5], tag=1)
        right = extend_chain(base, env.oracle, [6, 7, 8], tag=2)
        assert is_prefix(base, left) and is_prefix(base, right)
        assert not is_prefix(left, right)
        assert not is_prefix(right, base)
        assert common_ancestor(left, right) is base
        assert truncate(right, 3) is base
        assert truncate(right, 100) is env.genesis
        assert truncate(right, 0) is right
        with pytest.raises(ValueError):
            truncate(right, -1)

    def test_common_ancestor_needs_shared_genesis(self, env, make_env):
        other = make_env({0: 1})
        with pytest.raises(ValueError):
            common_ancestor(env.genesis, Chain.genesis(other.genesis.tip, env.oracle))

    def test_dump_chain(self, env, extend_chain):
        chain = extend_chain(env.genesis, env.oracle, [1, 2])
        lines = dump_chain(chain, env.oracle).splitlines()
        assert len(lines) == 3
        assert lines[0].split()[2] == '-'
        assert lines[2].split()[3] == '2'


class TestLedger:
    def test_genesis_distribution(self):
        genesis = make_genesis({0: 5, 1: 7})
        ledger = genesis_ledger(genesis)
        assert ledger.stake_distribution() == {0: 5, 1: 7}
        assert ledger.space_distribution() == {}
        assert all(tx.kind == TxKind.ALLOCATE for tx in genesis.txs)

    def test_genesis_pledge_for_space(self):
        ledger = genesis_ledger(make_genesis({0: 5, 1: 7}, pledge=True))
        assert ledger.space_distribution() == {0: 5, 1: 7}
        assert ledger.stake(0) == 5

    def test_transaction_rules(self):
        ledger = genesis_ledger(make_genesis({0: 10, 1: 10}))
        assert ledger.accepts(Transaction.transfer(0, 1, 10, 1))
        assert not ledger.accepts(Transaction.transfer(0, 1, 11, 1))
        assert not ledger.accepts(Transaction.transfer(0, 1, 1, 0))  # nonce уже использован
        assert not ledger.accepts(Transaction.transfer(0, 1, -1, 1))
        assert not ledger.accepts(Transaction.release(0, 1, 1))
        assert not ledger.accepts(Transaction(TxKind.ALLOCATE, 0, 5, 100, 0))
        assert ledger.accepts(Transaction.payload_tx(0, b'x', 1))

    def test_pledge_and_release(self):
        ledger = genesis_ledger(make_genesis({0: 10}))
        assert ledger.apply_valid([Transaction.pledge(0, 6, 1), Transaction.release(0, 2, 2)])
        assert (ledger.liquid[0], ledger.pledged[0]) == (6, 4)
        assert ledger.stake(0) == 10 and ledger.space(0) == 4

    def test_apply_valid_stops_on_first_bad(self):
        ledger = LedgerState({0: 3})
        assert not ledger.apply_valid([Transaction.transfer(0, 1, 2, 1), Transaction.transfer(0, 1, 2, 2)])


class TestValidator:
    def test_validate_txs_against_chain_state(self, env):
        txs = [Transaction.transfer(0, 1, 4, 1), Transaction.transfer(1, 2, 14, 1)]
        assert env.validator.validate_txs(env.genesis, txs)
        assert not env.validator.validate_txs(env.genesis, list(reversed(txs)))

    def test_select_txs_respects_cap_and_order(self, env):
        candidates = [Transaction.payload_tx(p, b'x', 1) for p in range(5)]
        candidates.insert(1, Transaction.transfer(0, 1, 999, 2))
        chosen = env.validator.select_txs(env.genesis, candidates, cap=3)
        assert [tx.sender for tx in chosen] == [0, 1, 2]
        assert env.validator.validate_txs(env.genesis, chosen)

    def test_block_reward_conservation(self, make_env, extend_chain):
        env = make_env({0: 10, 1: 10}, block_reward=2)
        chain = extend_chain(env.genesis, env.oracle, [0, 1, 1])
        ledger = env.validator.ledger(chain)
        assert ledger.total() == 20 + 2 * chain.height
        assert ledger.stake(1) == 14

    def test_validate_mined_chain(self, pow_env, mine_block):
        env = pow_env
        block = mine_block(env, env.genesis, 3, [Transaction.payload_tx(3, b'p', 1)])
        chain = env.genesis.extend(block, env.oracle)
        assert env.validator.validate_chain(chain, env.allocator.validate)

    def test_cache_is_kept_per_callback(self, pow_env, mine_block):
        env = pow_env
        chain = env.genesis.extend(mine_block(env, env.genesis, 3), env.oracle)
        assert env.validator.validate_chain(chain, env.allocator.validate)
        assert not env.validator.validate_chain(chain, lambda *a: False)
        assert env.validator.validate_chain(chain, env.allocator.validate)

    def test_rejects_tampered_blocks(self, pow_env, mine_block):
        env = pow_env
        block = mine_block(env, env.genesis, 3)
        stolen = replace(block, producer=4)
        assert not env.validator.validate_chain(env.genesis.extend(stolen, env.oracle),
                                                env.allocator.validate)
        overdraft = replace(block, txs=(Transaction.transfer(3, 4, 50, 1),))
        assert not env.validator.validate_chain(env.genesis.extend(overdraft, env.oracle),
                                                env.allocator.validate)

    def test_rejects_foreign_genesis(self, env, make_env):
        other = make_env({0: 1}, seed=8)
        foreign = Chain.genesis(other.genesis.tip, other.oracle)
        block = Block(parent=foreign.digest, producer=0, slot=1)
        assert not env.validator.validate_chain(foreign.extend(block, env.oracle), lambda *a: True)
