import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

TEX_TEXT = """\
tbox:
A <= B
A & B <= C
C <= exists r . Top
exists r . Top <= D
abox:
A(a)
"""


@pytest.fixture
def tex():
    """The four-axiom worked example: TBox, ABox, minimal heights."""
    from strata import check_stratification, normalize, parse_kb

    kb = parse_kb(TEX_TEXT)
    tbox, _ = normalize(kb.gcis)
    res = check_stratification(tbox)
    assert res.accepted
    return tbox, kb.abox, res.height
