from .base import PenalizationConfig, SplitSystem, StageOptions, constant_mu
from .bounds import StabilityBound, linear_stability_bound, subcharacteristic_check
from .vdp import VdpSystem, vdp_system
from .broadwell import BroadwellSystem, broadwell_system
from .diffusive2x2 import Closure, Diffusive2x2System, diffusive2x2_system, identity_closure, zero_closure
from .klf import KlfSystem, klf_parabolic_cfl, klf_system
from .r13 import R13System, r13_steady_profile, r13_steady_state, r13_system

__all__ = [
    "PenalizationConfig",
    "SplitSystem",
    "StageOptions",
    "constant_mu",
    "StabilityBound",
    "linear_stability_bound",
    "subcharacteristic_check",
    "VdpSystem",
    "vdp_system",
    "BroadwellSystem",
    "broadwell_system",
    "Closure",
    "Diffusive2x2System",
    "diffusive2x2_system",
    "identity_closure",
    "zero_closure",
    "KlfSystem",
    "klf_parabolic_cfl",
    "klf_system",
    "R13System",
    "r13_steady_profile",
    "r13_steady_state",
    "r13_system",
]
