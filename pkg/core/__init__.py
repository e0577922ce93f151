from .oracle import Digest, HashOracle, encode_parts
from .signatures import Signature, SignatureRegistry, SigningKey
from .blocks import Block, Transaction, TxKind
from .chain import Chain, ChainState, common_ancestor, dump_chain, is_prefix, truncate
from .ledger import LedgerState, genesis_ledger, make_genesis
from .validation import ChainValidator, RaValidate

__all__ = [
    'Digest', 'HashOracle', 'encode_parts',
    'Signature', 'SignatureRegistry', 'SigningKey',
    'Block', 'Transaction', 'TxKind',
    'Chain', 'ChainState', 'common_ancestor', 'dump_chain', 'is_prefix', 'truncate',
    'LedgerState', 'genesis_ledger', 'make_genesis',
    'ChainValidator', 'RaValidate',
]
