"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the pure-Python
mirror. Setting ``ELRP_PURE_PYTHON=1`` forces the fallback.
"""

import os
from . import _pykernels

_impl = _pykernels
if os.environ.get("ELRP_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND: str = _impl.BACKEND
INF = _pykernels.INF
RELOCATE_INTRA = _pykernels.RELOCATE_INTRA
TWO_OPT = _pykernels.TWO_OPT
RELOCATE_INTER = _pykernels.RELOCATE_INTER
TWO_OPT_STAR = _pykernels.TWO_OPT_STAR
EXCHANGE = _pykernels.EXCHANGE

route_cost = _impl.route_cost
insertion_scan = _impl.insertion_scan
insertion_scan_tw = _impl.insertion_scan_tw
local_search = _impl.local_search
scan_routes = _impl.scan_routes
scan_route_many = _impl.scan_route_many
prepare_matrix = _impl.prepare_matrix
prepare_vector = _impl.prepare_vector


def backend_module(name: str):
    """Return the kernel module called ``name`` ("python" or "cython")."""
    if name == "python":
        return _pykernels
    from . import _ckernels
    return _ckernels


class KernelData:
    """Per-instance matrices and node vectors in the layout the backend wants."""

    def __init__(self, instance, module=None):
        mod = module or _impl
        self.module = mod
        self.cost_se = mod.prepare_matrix(instance.cost_se_np)
        self.cost_fe = mod.prepare_matrix(instance.cost_fe_np)
        self.time_se = mod.prepare_matrix(instance.time_se_np)
        self.time_fe = mod.prepare_matrix(instance.time_fe_np)
        self.demand = mod.prepare_vector(instance.demand)
        self.service = mod.prepare_vector(instance.service)
        # second-echelon windows: depot nodes carry depot ∩ bike work window
        ve, vl = instance.se_vehicle.work_window
        se_e = list(instance.tw_early)
        se_l = list(instance.tw_late)
        for t in instance.depot_ids:
            se_e[t] = max(se_e[t], ve)
            se_l[t] = min(se_l[t], vl)
        self.se_tw_e = mod.prepare_vector(se_e)
        self.se_tw_l = mod.prepare_vector(se_l)
        # first-echelon windows: node 0 carries the truck work window
        self.fe_tw_e = mod.prepare_vector(instance.tw_early)
        self.fe_tw_l = mod.prepare_vector(instance.tw_late)


def kernel_data(instance) -> KernelData:
    """Cached :class:`KernelData` for ``instance`` (keyed by identity)."""
    kd = getattr(instance, "_kernel_data", None)
    if kd is None or kd.module is not _impl:
        kd = KernelData(instance)
        object.__setattr__(instance, "_kernel_data", kd)
    return kd
