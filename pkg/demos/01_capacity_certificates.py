"""Capacity certificates for the builtin testbeds.

The oracle enumerates every admissible route per class, then solves the
fractional route-decomposition + activation-mixing program exactly over
rationals. The returned certificate is a checkable witness: a flow split
per class and a probability mixture over activations under which no edge
is overloaded at the scaled rates.
"""
from umwsim import builtin_topology, max_scaling, verify_certificate

for name in ("line3", "twinpath_unicast", "grid3x3_broadcast"):
    g, aset, classes = builtin_topology(name)
    cert = max_scaling(g, aset, classes)
    print(f"\n=== {name} ===")
    print(f"graph: {g.node_count} nodes, {g.m} edges, "
          f"{'directed' if g.directed else 'undirected'}, activation={aset.kind}")
    for cls in classes:
        print(f"  class {cls.id}: {cls.kind} {cls.source} -> {sorted(cls.destinations)}, "
              f"rate {cls.rate}")
    print(f"max scaling rho* = {cert.rho_star} = {float(cert.rho_star):.6f}")
    print(f"certificate verifies: {verify_certificate(cert, g, aset, classes)}")

    # The witness itself: which routes carry flow, which activations mix.
    for cid, edges, rate in cert.flows:
        print(f"  flow class {cid}: {float(rate):.4f} on edges {list(edges)}")
    for edges, p in cert.activation_mix:
        print(f"  activate {list(edges)} w.p. {float(p):.4f}")

# The grid value 2/5 is the interesting one: the corner-rooted directed grid
# forces every broadcast tree through two node-sharing edge pairs, and the
# exact LP reproduces that bottleneck.
