"""Run every figure script with small trial counts (smoke run)."""
import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
SCRIPTS = ["fig1_noma_vs_oma.py", "fig2_rician_scale.py", "fig3_dimension_convergence.py",
           "fig4_epsilon.py", "fig5_density.py", "fig6_compare.py"]

if __name__ == "__main__":
    trials = sys.argv[1] if len(sys.argv) > 1 else "200"
    codes = [subprocess.call([sys.executable, str(HERE / s), "--trials", trials]) for s in SCRIPTS]
    sys.exit(max(codes))
