"""Broadcast on the 3x3 grid: stable below capacity, diverging above.

Sweeps the arrival rate across the capacity boundary (2/5) and prints the
time-average and final queue totals per load. Below capacity the total
queue stays flat; above it grows linearly and the run is flagged as
diverging.
"""
from umwsim import SimulationConfig, sweep
from umwsim.traffic import ArrivalProcess

cfg = SimulationConfig(
    topology="grid3x3_broadcast",
    horizon=30_000,
    seed=42,
    policy="umw",
    arrival=ArrivalProcess("binomial", trials=4),
)

loads = [0.20, 0.30, 0.36, 0.40, 0.44, 0.50]
rows = sweep(cfg, loads)

print(f"{'rate':>6} {'avg queue':>12} {'final queue':>12} {'throughput':>11} verdict")
for row in rows:
    print(f"{row['load']:>6.2f} {row['avg_total_queue']:>12.1f} "
          f"{row['final_total_queue']:>12d} {row['throughput_c0']:>11.4f} {row['verdict']}")

print("\ncapacity boundary is at rate 2/5 = 0.40; runs above it accumulate backlog")
