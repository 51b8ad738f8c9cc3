"""Re-export of the brute-force oracles shipped with the package."""
from padicstrat.oracles import *  # noqa: F401,F403
