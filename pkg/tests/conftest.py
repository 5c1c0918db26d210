"""Session fixtures for the expensive 2D runs, shared by the simulation
tests and the acceptance suite so each configuration integrates once.

All runs are deterministic (fixed seeds enter only through explicit mode
phases; the stepping itself has no randomness), so the asserted numbers
are reproducible bit for bit.
"""

import math

import numpy as np
import pytest

from frontlab import sim2d, spectral
from frontlab.criteria import lambda2c
from frontlab.geometry import build_front
from frontlab.models import make_model
from frontlab.spectral import fast_width

FHN_ELLS = (0.005, 0.01)
SIDEBAND_NS = (1, 2, 3, 4, 6, 8, 14)
SIDEBAND_ELL1 = 0.0075


@pytest.fixture(scope="session")
def fhn_skeleton_001():
    return build_front(make_model("fhn"), eps=0.01)[0]


def _fhn_growth_config(skel, dt):
    # the slow tails decay like exp(-eps*sqrt(3)*|x|): the 480-unit box keeps
    # the wall shift of the near-zero eigenvalues below one percent
    ly = 2.0 * math.pi / FHN_ELLS[0]
    return sim2d.SimConfig(
        model=skel.model,
        eps=0.01,
        domain=(480.0, ly),
        grid=(3840, 32),
        dt=dt,
        t_end=150.0,
        log_every=int(round(1.0 / dt)),
        skeleton=skel,
        initial=sim2d.ModeSeed(tuple((ell, None, 0.0) for ell in FHN_ELLS)),
    )


@pytest.fixture(scope="session")
def fhn_growth(fhn_skeleton_001):
    # ~100 s: the 2D linear-growth measurement for the stable FHN front
    cfg = _fhn_growth_config(fhn_skeleton_001, 0.02)
    _, mode_log, interface_log = sim2d.run(cfg)
    rates = dict(sim2d.growth_rates(mode_log, (30.0, 150.0)))
    return {
        "rates": rates,
        "mode_log": mode_log,
        "interface_log": interface_log,
        "lambda2c": lambda2c(fhn_skeleton_001, 0.01),
    }


@pytest.fixture(scope="session")
def fhn_growth_coarse(fhn_skeleton_001):
    # ~50 s: the same run at doubled dt, for the step-halving invariant
    cfg = _fhn_growth_config(fhn_skeleton_001, 0.04)
    _, mode_log, _ = sim2d.run(cfg)
    return dict(sim2d.growth_rates(mode_log, (30.0, 150.0)))


@pytest.fixture(scope="session")
def bcde_sideband():
    # ~90 s: growth rates across the instability band, compared against the
    # eigenvalue problem posed on the same truncated domain (Neumann walls
    # at +-80 shift the smallest wavenumbers, so the matched operator is
    # the honest reference)
    model = make_model("bcde")
    eps = 0.02
    skel = build_front(model, eps)[0]
    ly = 2.0 * math.pi / SIDEBAND_ELL1
    grid_spec = spectral.GridSpec(h=0.02, L=80.0, boundary="neumann", refine=True)
    reference = {}
    for n in SIDEBAND_NS:
        asm = spectral.assemble(skel, n * SIDEBAND_ELL1, grid_spec)
        lam, _, _ = spectral.critical_eigenvalue(asm, 0.0 + 0.0j)
        reference[n] = lam.real
    cfg = sim2d.SimConfig(
        model=model,
        eps=eps,
        domain=(160.0, ly),
        grid=(1280, 128),
        dt=0.025,
        t_end=100.0,
        log_every=40,
        skeleton=skel,
        initial=sim2d.ModeSeed(tuple((n * SIDEBAND_ELL1, None, 0.0) for n in SIDEBAND_NS)),
    )
    _, mode_log, _ = sim2d.run(cfg)
    by_ell = dict(sim2d.growth_rates(mode_log, (30.0, 90.0)))
    rates = {n: by_ell[n * SIDEBAND_ELL1] for n in SIDEBAND_NS}
    return {
        "reference": reference,
        "rates": rates,
        "lambda2c": lambda2c(skel, eps),
    }


@pytest.fixture(scope="session")
def fotm_fingers():
    # ~150 s: transversally unstable front far into the nonlinear regime
    model = make_model(
        "fotm", params={"mu1": 3.5, "mu2": 1.1, "mu3": 3.2, "mu4": 1.0, "mu5": 0.4}
    )
    eps = 0.04
    skel = build_front(model, eps)[0]
    width = fast_width(skel)
    ly = 210.0
    cfg = sim2d.SimConfig(
        model=model,
        eps=eps,
        domain=(120.0, ly),
        grid=(400, 128),
        dt=0.025,
        t_end=600.0,
        log_every=100,
        comoving=True,
        skeleton=skel,
        initial=sim2d.ModeSeed(
            (
                (3 * 2.0 * math.pi / ly, 0.25 * width, 0.0),
                (5 * 2.0 * math.pi / ly, 0.05 * width, 1.0),
            )
        ),
    )
    _, _, interface_log = sim2d.run(cfg)
    return {
        "interface_log": interface_log,
        "width": width,
        "speed": skel.speed,
        "t_end": cfg.t_end,
    }


@pytest.fixture(scope="session")
def bcde_cusps():
    # ~540 s, the longest run in the suite: sign-flipped slow reaction gives
    # u+ ~ 10, so |G_v| ~ 100 forces dt = 0.002.  Ly = 150 puts the n = 2
    # mode at the peak of the instability band; the large seed shortens the
    # linear phase so the corrugation reaches its plateau inside t_end
    model = make_model("bcde", params={"mu1": 0.1, "mu2": 0.1, "mu3": 2.0})
    eps = 0.01
    skel = build_front(model, eps)[0]
    width = fast_width(skel)
    ly = 150.0
    cfg = sim2d.SimConfig(
        model=model,
        eps=eps,
        domain=(120.0, ly),
        grid=(600, 64),
        dt=0.002,
        t_end=300.0,
        log_every=500,
        comoving=True,
        skeleton=skel,
        initial=sim2d.ModeSeed(
            (
                (2 * 2.0 * math.pi / ly, 0.35 * width, 0.0),
                (3 * 2.0 * math.pi / ly, 0.06 * width, 1.0),
            )
        ),
    )
    _, _, interface_log = sim2d.run(cfg)
    return {
        "interface_log": interface_log,
        "width": width,
        "speed": skel.speed,
        "t_end": cfg.t_end,
        "dy": ly / cfg.grid[1],
    }
