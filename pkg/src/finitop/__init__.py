"""Finite-resolution tests for arcs, circles and lines in presented metric spaces."""

from .checkers import (
    Resolution,
    Status,
    Verdict,
    check_btw,
    check_circ,
    check_conn,
    check_cpct,
    check_lc,
    check_ndegen,
    check_ord,
    classify_arc,
    classify_circle,
    replay,
)
from .line import (
    TreeSpec,
    check_real_line,
    compactify,
    embed_p,
    gen_line_presentation,
)
from .presentation import FiniteNet, Presentation, SparsePoint, build_net, eps_path
from .sawtooth import WTable, gen_sawtooth, sawtooth_f
from .tendrils import circle_wrap, run_pi4_chain, run_sigma3, run_stages

__version__ = "0.1.0"
