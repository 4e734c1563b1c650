import numpy as np
import pytest

from conftest import CATALOG_TRIPLES, FAT_TRIPLES, triple
from fatsub import dualfol as D
from fatsub.fatness import fatness_margin


@pytest.mark.parametrize("g, h, k", FAT_TRIPLES)
def test_fat_triples_are_twisted_with_full_span(g, h, k):
    t = triple(g, h, k)
    assert D.a_span(t).dim == t.dp
    assert D.bracket_closure(t).twisted
    assert D.ambrose_singer_check(t, fat=True)


def test_product_not_twisted(product):
    rep = D.bracket_closure(product)
    assert rep.depth_dims == [3]
    assert not rep.twisted
    assert D.a_span(product).dim == 0
    assert D.ambrose_singer_check(product)


def test_abelian(abelian):
    rep = D.bracket_closure(abelian)
    assert (rep.depth_dims, rep.twisted, rep.saturated_at) == ([2], False, 0)


def test_sp2_depth(sp2):
    rep = D.bracket_closure(sp2)
    assert rep.depth_dims == [4, 10]
    assert rep.final_dim == rep.dim_g == 10


@pytest.mark.parametrize("g, h, k", CATALOG_TRIPLES)
def test_basepoint_identity_everywhere(g, h, k):
    t = triple(g, h, k)
    fat = t.dp >= 1 and t.dm >= 2 and fatness_margin(t).is_fat
    assert D.ambrose_singer_check(t, fat)


def test_extra_generators_enlarge_closure(product):
    # adding a generator of the diagonal fills g
    extra = np.zeros(product.dim)
    extra[product.sp] = [1.0, 0.0, 0.0]
    rep = D.bracket_closure(product, extra)
    assert rep.final_dim > product.dm


def test_depths_monotone():
    t = triple("su3", "su2", "e")
    dims = D.bracket_closure(t).depth_dims
    assert dims == sorted(dims) and dims[0] == t.dm
