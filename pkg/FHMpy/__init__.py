from FHMpy.economy import Economy, bundled_economy, parse_economy, parse_allocation
from FHMpy.core import in_strong_core, in_weak_core, ttc
from FHMpy.equilibrium import find_weak_core_ETE
