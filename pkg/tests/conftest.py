import pytest

from helpers import build_corpus


@pytest.fixture(scope="session")
def corpus():
    """name -> (algebra, validation report, expected pattern).

    Families a..e, the two coclass-2 algebras, the fake-at-85 algebra at
    degree 200, the tensor construction over the metabelian maximal-class
    algebra, and the once-deflated parameter-(7,7) algebra.
    """
    return build_corpus()
