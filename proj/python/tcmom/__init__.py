"""Method-of-moments characteristic-mode toolkit.

Plate/MIMO scenes, modal sweeps with tracking, coupling-mode
classification, and slot (DGS) isolation studies. The heavy lifting is
done by the C++ extension ``_tcmom``; this package just re-exports it.
"""

try:
    from ._tcmom import *  # installed-wheel layout
    from ._tcmom import __doc__ as _core_doc
except ImportError:  # build-tree layout: extension on PYTHONPATH
    from _tcmom import *  # type: ignore[import-not-found]
    from _tcmom import __doc__ as _core_doc

__all__ = [
    "preset_names",
    "mesh_stats",
    "mesh_text",
    "impedance",
    "modes_at",
    "sweep",
    "classify",
    "dgs_study",
    "modal_significance",
    "characteristic_angle",
    "config_hash_of",
    "MS_BAND_THRESHOLD",
    "ARTIFACT_VERSION",
    "TcmError",
]
