"""Built-in experiment programs.

Five ready-to-run setups expressed in the DSL: the simple delayed-choice
interferometer (`dc`), the entangled quantum eraser (`eraser`), the
quantum-controlled morphing experiment (`pdbs`), the polarization-MZI
dimension witness (`dw`, realized on two spatial modes), and the heralded
witness (`herald-dw`).  The witness builtins carry their protocol phase
settings so the CLI and test harness can drive the multi-run measurement
procedures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Dict

from .analytics import (HERALD_SETTINGS, IDW_SETTINGS, W2_SETTINGS,
                        DWSettings, HeraldSettings)
from .dsl import ExperimentSpec, UnknownBuiltinError, parse

_PI = math.pi


@dataclass(frozen=True)
class DWProtocolSettings:
    """Phase settings for both witness measurements run on the `dw` setup."""

    w2: DWSettings = W2_SETTINGS
    idw: DWSettings = IDW_SETTINGS

    # convenience aliases for the preparation/measurement phases of the
    # determinant witness, the more commonly inspected of the two
    @property
    def phis(self):
        return self.w2.phis

    @property
    def sigmas(self):
        return self.w2.sigmas


_DC_TEXT = """\
experiment "dc"
param alpha = 0.1
param theta = 0
param phi = 0
mode a, b
source laser(alpha = alpha) -> a
source vacuum -> b
element bs(a, b)
element hwp(a, theta)
element phase(a, phi)
element mirror_swap(a, b)
element bs(a, b)
element polarizer(a, 0)
element polarizer(b, 0)
detector D1 on a
detector D2 on b
postselect click(D1) & noclick(D2)
trials 1000000
seed 0
"""

_ERASER_TEXT = """\
experiment "eraser"
param r = 1.0
param theta = 45 deg
param phi = 0
mode a, b, c
source entangled(r = r) -> a, c
source vacuum -> b
element bs(a, b)
element hwp(a, theta)
element phase(a, phi)
element mirror_swap(a, b)
element bs(a, b)
element polarizer(a, 0)
element polarizer(b, 0)
element polarizer(c, 45 deg)
detector D1 on a
detector D2 on b
detector D3 on c
postselect click(D1) & noclick(D2)
condition on click(D3)
trials 1000000
seed 0
"""

_PDBS_TEXT = """\
experiment "pdbs"
param r = 0.25
param theta = 0
param phi = 0
mode a, b, c, m1, m2, m3
source entangled(r = r) -> a, c
source vacuum -> b
source vacuum -> m1
source vacuum -> m2
source vacuum -> m3
element bs(a, b)
element phase(a, phi)
element pdbs(b, a)
element hwp(b, 22.5 deg)
element hwp(a, 22.5 deg)
element hwp(c, theta)
element pbs(b, m1)
element pbs(a, m2)
element pbs(c, m3)
detector D1 on b
detector D2 on m1
detector D3 on a
detector D4 on m2
detector D5 on c
detector D6 on m3
postselect click(D1) | click(D2)
condition on ((click(D1) & noclick(D2) & noclick(D3) & noclick(D4)) | (noclick(D1) & click(D2) & noclick(D3) & noclick(D4)) | (noclick(D1) & noclick(D2) & click(D3) & noclick(D4)) | (noclick(D1) & noclick(D2) & noclick(D3) & click(D4))) & noclick(D5) & click(D6)
trials 5000000
seed 0
"""

_DW_TEXT = """\
experiment "dw"
param alpha2 = 1.0
param alpha = 1.0
param delta = 0
mode a, b, v1, v2
source laser(alpha = alpha) -> a
source vacuum -> b
source vacuum -> v1
source vacuum -> v2
element bs(a, b)
element phase(a, delta)
element bs(a, b)
element pbs(a, v1)
element pbs(b, v2)
detector D1 on a
detector D2 on b
postselect click(D1) & noclick(D2)
condition on (click(D1) & noclick(D2)) | (noclick(D1) & click(D2))
trials 1000000
seed 0
"""

_HERALD_TEXT = """\
experiment "herald-dw"
param r = 1.0
param ax = 90 deg
param by = 90 deg
mode a, b, r1, r2, v3, v4
source entangled(r = r) -> a, b
source vacuum -> r1
source vacuum -> r2
source vacuum -> v3
source vacuum -> v4
element pbs(a, r1)
element phase(r1, ax)
element pbs(a, r1)
element hwp(a, 22.5 deg)
element pbs(b, r2)
element phase(r2, by)
element pbs(b, r2)
element hwp(b, 22.5 deg)
element pbs(b, v3)
element pbs(a, v4)
detector D1 on b
detector D2 on v3
detector D3 on a
detector D4 on v4
postselect click(D1) & noclick(D2)
condition on (click(D3) & noclick(D4)) | (noclick(D3) & click(D4))
trials 1000000
seed 0
"""

_TEXTS: Dict[str, str] = {
    "dc": _DC_TEXT,
    "eraser": _ERASER_TEXT,
    "pdbs": _PDBS_TEXT,
    "dw": _DW_TEXT,
    "herald-dw": _HERALD_TEXT,
}

_SETTINGS = {
    "dw": DWProtocolSettings(),
    "herald-dw": HERALD_SETTINGS,
}

BUILTIN_NAMES = tuple(sorted(_TEXTS))


def builtin_text(name: str) -> str:
    """Source text of a built-in experiment program."""

    try:
        return _TEXTS[name]
    except KeyError:
        raise UnknownBuiltinError(
            f"unknown builtin {name!r}; available: {', '.join(BUILTIN_NAMES)}") from None


def builtin(name: str) -> ExperimentSpec:
    """Parsed and validated built-in experiment, with witness protocol
    settings attached where the setup has one."""

    spec = parse(builtin_text(name))
    settings = _SETTINGS.get(name)
    if settings is not None:
        spec = replace(spec, witness_settings=settings)
    return spec
