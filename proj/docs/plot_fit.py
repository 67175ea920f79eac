"""Plot ln I from simulate next to ln(count) from the data.

usage: python docs/plot_fit.py OUT_DIR [periods.csv METRO]
"""
import sys

import matplotlib.pyplot as plt
import pandas as pd

out = sys.argv[1]
sim = pd.read_csv(f"{out}/plot_sim.csv", na_values="NA")
fig, ax = plt.subplots(figsize=(8, 4))
ax.plot(sim["day"], sim["log_i"], label="model ln I")
try:
    data = pd.read_csv(f"{out}/plot_data.csv", na_values="NA")
    ax.plot(data["day"], data["log_count"], ".", ms=3, label="data ln count")
except FileNotFoundError:
    pass

if len(sys.argv) > 3:
    periods = pd.read_csv(sys.argv[2], parse_dates=["start"])
    periods = periods[periods["metro"] == sys.argv[3]]
    first = periods["start"].min()
    for start in periods["start"].iloc[1:]:
        ax.axvline((start - first).days, color="grey", lw=0.6, ls="--")

ax.set_xlabel("day")
ax.set_ylabel("ln")
ax.legend()
fig.tight_layout()
fig.savefig(f"{out}/fit.png", dpi=120)
print(f"wrote {out}/fit.png")
