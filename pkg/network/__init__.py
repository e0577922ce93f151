from .engine import Simulation, step
from .gossip import DelayModel, Envelope, FixedDelay, GossipNetwork, UniformDelay, build_delay_model


__all__ = ['Simulation', 'step', 'DelayModel', 'Envelope', 'FixedDelay', 'GossipNetwork',
           'UniformDelay', 'build_delay_model']
