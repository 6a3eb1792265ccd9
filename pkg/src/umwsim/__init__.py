"""Slotted-time simulator and capacity toolkit for max-weight control of
generalized network flows (unicast, broadcast, multicast, anycast)."""

from .activation import ActivationVector, activation_weight, max_weight_activation
from .capacity import CapacityCertificate, enumerate_routes, max_scaling, verify_certificate
from .engine import (
    MetricsOptions,
    MetricsReport,
    SimulationConfig,
    capacity_certificate,
    compare,
    load_config,
    run,
    sweep,
)
from .errors import (
    CapExceededError,
    ConfigError,
    DisconnectedError,
    TopologyError,
    UnreachableError,
    UmwsimError,
)
from .physical_net import Packet, PhysicalNetwork
from .policy import (
    BPState,
    PolicyDecision,
    bp_absorb,
    bp_decide,
    solve_route,
    umw_decide,
    umw_heuristic_decide,
)
from .routing import (
    RouteTree,
    anycast_route,
    route_cost,
    shortest_path_route,
    spanning_route,
    steiner_route,
)
from .topology import (
    ActivationSet,
    Graph,
    builtin_topology,
    enumerate_matchings,
    load_topology,
    save_topology,
)
from .traffic import ArrivalProcess, TrafficClass, arrival_table, effective_amax
from .virtual_net import (
    AssociatedQueues,
    VirtualQueues,
    loading_slack,
    skorokhod_profile,
    skorokhod_value,
    virtual_arrival_vector,
)

__version__ = "0.1.0"
