from .messages import Message, MessageKind
from .state import ProcessState
from .view import ChainView, Received
from .process import Process

__all__ = ['Message', 'MessageKind', 'ProcessState', 'ChainView', 'Received', 'Process']
