"""Delay comparison on shared arrival sample paths.

Part 1: the two-session wired testbed at half load. Back-pressure explores
every path and lets packets wander, so its time-average backlog is several
times larger than either max-weight variant, which commit each packet to a
cheapest acyclic route at admission.

Part 2: broadcast on the wireless grid. Feeding the same decision rules
physical queue lengths instead of the virtual counters gives visibly
smaller physical backlogs; the virtual state can idle links whose buffers
are actually full.
"""
from umwsim import SimulationConfig, compare
from umwsim.traffic import ArrivalProcess

print("=== twinpath, two unicast sessions, load 0.5, three seeds ===")
print(f"{'seed':>4} {'umw':>8} {'umw-heuristic':>14} {'bp':>8} {'bp mean sojourn':>16}")
for seed in (1, 2, 3):
    cfg = SimulationConfig(
        topology="twinpath_unicast", horizon=20_000, seed=seed,
        arrival=ArrivalProcess("poisson"), load_factor=0.5,
    )
    reports = compare(cfg, ["umw", "umw-heuristic", "bp"])
    avg = {p: r.avg_total_queue() for p, r in reports.items()}
    print(f"{seed:>4} {avg['umw']:>8.2f} {avg['umw-heuristic']:>14.2f} "
          f"{avg['bp']:>8.2f} {reports['bp'].mean_sojourn:>16.2f}")

print("\n=== grid broadcast, rate 0.3, virtual-queue vs physical-queue weights ===")
print(f"{'seed':>4} {'optimal':>9} {'heuristic':>10}")
for seed in (1, 2, 3):
    cfg = SimulationConfig(
        topology="grid3x3_broadcast", horizon=20_000, seed=seed,
        arrival=ArrivalProcess("binomial", trials=4), load_factor=0.3,
    )
    reports = compare(cfg, ["umw", "umw-heuristic"])
    print(f"{seed:>4} {reports['umw'].avg_total_queue():>9.2f} "
          f"{reports['umw-heuristic'].avg_total_queue():>10.2f}")
