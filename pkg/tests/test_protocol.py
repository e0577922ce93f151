import pytest

from core.blocks import Transaction
from core.chain import ChainState
from protocol import ChainView, Message, MessageKind, Process


@pytest.fixture
def process(pow_env):
    def build(pid: int = 0, k: int = 2, cap=None) -> Process:
        env = pow_env
        return Process(pid, env.genesis, env.validator, env.allocator, env.registry.key_for(pid), k,
                       block_size_cap=cap)
    return build


def _tx(sender: int, nonce: int) -> Transaction:
    return Transaction.payload_tx(sender, f"{sender}-{nonce}".encode(), nonce)


class TestExtend:
    def test_commit_and_adopt_own_block(self, pow_env, process):
        node = process()
        node.begin_step(1000)
        tx = _tx(1, 1)
        node.on_gossip_tx(tx)
        request = node.extend(step=0, slot=0)
        assert request.state.block.txs == (tx,)
        assert request.budget == 1000
        assert node.state.r_i == 0
        messages = node.on_assign(pow_env.allocator.commit(request))
        assert node.state.r_i == 1000
        assert [m.kind for m in messages] == [MessageKind.BLK]
        assert node.receive(messages[0], 1) == []
        assert node.state.c_local.height == 1
        assert node.needs_extend

    def test_failed_commit_requests_retry(self, pow_env, process):
        node = process()
        node.begin_step(0)
        request = node.extend(step=0, slot=0)
        assert not node.needs_extend
        assert node.on_assign(pow_env.allocator.commit(request)) == []
        assert node.retry and node.needs_extend

    def test_is_committed_adopts_longer_chain(self, pow_env, process, mine_block):
        env = pow_env
        node = process()
        state = ChainState(env.genesis, mine_block(env, env.genesis, 0))
        assert not node.on_is_committed(state, False)
        assert node.state.c_local.height == 0
        assert node.on_is_committed(state, True)
        assert node.state.c_local.tip == state.block
        assert not node.on_is_committed(state, True)

    def test_block_size_cap(self, pow_env, process):
        node = process(cap=2)
        node.begin_step(1)
        for sender in range(5):
            node.on_gossip_tx(_tx(sender, 1))
        assert len(node.extend(0, 0).state.block.txs) == 2

    def test_nonces_increase(self, process):
        node = process(pid=3)
        assert [node.next_nonce() for _ in range(3)] == [1, 2, 3]


class TestBlocks:
    def test_orphan_is_requested_once_then_adopted(self, pow_env, process, mine_block):
        env = pow_env
        b1 = mine_block(env, env.genesis, 1)
        c1 = env.genesis.extend(b1, env.oracle)
        b2 = mine_block(env, c1, 2, slot=2)
        node = process()
        assert node.receive(Message.blk(b2), 1) == [Message.request(b2)]
        assert node.receive(Message.blk(b2), 2) == []
        assert node.state.c_local.height == 0
        node.receive(Message.blk(b1), 3)
        assert node.state.c_local.height == 2
        assert node.state.c_local.tip == b2

    def test_request_is_answered_with_whole_chain(self, pow_env, process, mine_block):
        env = pow_env
        b1 = mine_block(env, env.genesis, 1)
        b2 = mine_block(env, env.genesis.extend(b1, env.oracle), 2, slot=2)
        node = process()
        node.receive(Message.blk(b1), 1)
        node.receive(Message.blk(b2), 1)
        answer = node.receive(Message.request(b2), 2)
        assert [m.block for m in answer] == [b1, b2]
        assert node.receive(Message.request(b2), 3) == []

    def test_equal_length_does_not_replace(self, pow_env, process, mine_block):
        env = pow_env
        first = mine_block(env, env.genesis, 1)
        second = mine_block(env, env.genesis, 2)
        node = process()
        node.receive(Message.blk(first), 1)
        node.receive(Message.blk(second), 1)
        assert node.state.c_local.tip == first
        assert len(node.view.tips()) == 2

    def test_invalid_block_is_dropped(self, pow_env, process, mine_block):
        env = pow_env
        block = mine_block(env, env.genesis, 1)
        forged = block.with_commitment(block.proof, env.registry.key_for(5).sign(block.signing_bytes))
        node = process()
        assert node.receive(Message.blk(forged), 1) == []
        assert node.state.c_local.height == 0


class TestDelivery:
    def test_only_k_deep_transactions_are_delivered(self, pow_env, process, mine_block):
        env = pow_env
        node = process(k=2)
        chain = env.genesis
        for height in range(1, 5):
            block = mine_block(env, chain, height, [_tx(9, height)], slot=height)
            chain = chain.extend(block, env.oracle)
            node.receive(Message.blk(block), height)
        assert node.state.c_local.height == 4
        assert node.deliver_prefix(10) == [_tx(9, 1), _tx(9, 2)]
        assert node.deliver_prefix(11) == []
        assert node.delivery_log() == [(10, _tx(9, 1)), (10, _tx(9, 2))]

    def test_no_duplicates_after_switch(self, pow_env, process, mine_block):
        env = pow_env
        node = process(k=1)
        tx = _tx(9, 1)
        a1 = mine_block(env, env.genesis, 1, [tx])
        a_chain = env.genesis.extend(a1, env.oracle)
        a2 = mine_block(env, a_chain, 1, slot=2)
        for block in (a1, a2):
            node.receive(Message.blk(block), 1)
        node.deliver_prefix(1)
        # Соседняя ветка с той же транзакцией оказывается длиннее
        b1 = mine_block(env, env.genesis, 2, [tx])
        chain = env.genesis.extend(b1, env.oracle)
        for slot in (2, 3):
            block = mine_block(env, chain, 2, slot=slot)
            chain = chain.extend(block, env.oracle)
            node.receive(Message.blk(b1), 2)
            node.receive(Message.blk(block), 2)
        assert node.state.c_local.tip == chain.tip
        node.deliver_prefix(3)
        assert node.delivered_sequence() == (tx,)


class TestView:
    def test_longest_and_tips(self, pow_env, mine_block):
        env = pow_env
        view = ChainView(env.validator, env.allocator, {env.genesis.digest: env.genesis.tip},
                         {env.genesis.digest: env.genesis})
        assert view.longest() is env.genesis
        block = mine_block(env, env.genesis, 1)
        received = view.receive(block)
        assert len(received.chains) == 1 and not received.request
        assert view.longest().tip == block
        assert view.knows(view.digest_of(block))
        assert view.receive(block).chains == []
