"""Group specs, hom classes, backends, and norm quotients."""

import pytest

from toricforms.exact_linalg import FGAbelianGroup, IntMatrix
from toricforms.fan_aut import automorphism_group
from toricforms.galois import (
    AssumptionViolated,
    BackendUnsupported,
    FiniteFieldBackend,
    GroupSpec,
    HomClass,
    RealComplexBackend,
    SymbolicBrauerBackend,
    enumerate_hom_classes,
    kernel_reduction,
    norm_quotient,
    reduce_backend,
    torsion_factor_invertible,
)

from test_fans import HEXAGON, P1, P1XP1, P2


def test_cyclic_group():
    g = GroupSpec.cyclic(6)
    assert g.order == 6
    assert g.is_abelian and g.is_cyclic
    assert g.cyclic_generator == 1
    assert g.element_order(2) == 3
    assert g.inverse(2) == 4
    assert g.power(1, 4) == 4
    assert g.subgroup_closure([2]) == frozenset({0, 2, 4})
    assert g.subgroup_closure([3]) == frozenset({0, 3})


def test_dihedral_group():
    g = GroupSpec.dihedral(12)
    assert g.order == 12
    assert not g.is_abelian and not g.is_cyclic
    m = 6
    # s * r = s r^1,  r * s = s r^{-1}
    assert g.mult(m, 1) == m + 1
    assert g.mult(1, m) == m + 5
    assert g.mult(m + 1, m + 1) == 0
    orders = sorted(g.element_order(a) for a in range(12))
    assert orders == [1, 2, 2, 2, 2, 2, 2, 2, 3, 3, 6, 6]
    assert GroupSpec.dihedral(2).order == 2


def test_explicit_group_validation():
    klein = [
        [0, 1, 2, 3],
        [1, 0, 3, 2],
        [2, 3, 0, 1],
        [3, 2, 1, 0],
    ]
    g = GroupSpec.explicit(klein, name="V4")
    assert g.order == 4 and g.is_abelian and not g.is_cyclic
    assert g.subgroup_closure(g.generators) == frozenset(range(4))
    with pytest.raises(AssertionError):
        GroupSpec.explicit([[0, 1], [1, 1]])


def test_hom_classes_c2_into_p1():
    aut = automorphism_group(P1)
    classes = enumerate_hom_classes(GroupSpec.cyclic(2), aut)
    assert len(classes) == 2
    assert sum(c.is_trivial for c in classes) == 1
    swap = next(c for c in classes if not c.is_trivial)
    assert swap.is_injective
    assert swap.matrix(1) == IntMatrix.from_rows([[-1]])
    assert swap.ray_orbits == ((0, 1),)
    assert swap.orbit_stabilizer((0, 1)) == frozenset({0})
    assert swap.coset_representatives((0, 1)) == {0: 0, 1: 1}


def test_hom_classes_c2_into_square():
    aut = automorphism_group(P1XP1)
    classes = enumerate_hom_classes(GroupSpec.cyclic(2), aut)
    # trivial, central -I, and the two reflection classes
    assert len(classes) == 4
    assert sorted(c.orbit_size for c in classes) == [1, 1, 2, 2]
    assert sum(c.orbit_size for c in classes) == 6  # = number of homs


def test_hom_classes_c4_into_square():
    aut = automorphism_group(P1XP1)
    classes = enumerate_hom_classes(GroupSpec.cyclic(4), aut)
    assert len(classes) == 5
    injective = [c for c in classes if c.is_injective]
    assert len(injective) == 1
    rot = injective[0]
    assert rot.matrix(1).power(4) == IntMatrix.identity(2)
    assert rot.ray_orbits == ((0, 1, 2, 3),)
    assert rot.orbit_stabilizer((0, 1, 2, 3)) == frozenset({0})


def test_hom_classes_c2_into_hexagon():
    aut = automorphism_group(HEXAGON)
    classes = enumerate_hom_classes(GroupSpec.cyclic(2), aut)
    assert len(classes) == 4
    assert sorted(c.orbit_size for c in classes) == [1, 1, 3, 3]


def test_hom_classes_trivial_group():
    aut = automorphism_group(P2)
    classes = enumerate_hom_classes(GroupSpec.cyclic(1), aut)
    assert len(classes) == 1
    assert classes[0].is_trivial
    assert classes[0].ray_orbits == ((0,), (1,), (2,))


def test_dihedral_homs_into_hexagon():
    aut = automorphism_group(HEXAGON)
    classes = enumerate_hom_classes(GroupSpec.dihedral(12), aut)
    injective = [c for c in classes if c.is_injective]
    assert len(injective) >= 1
    full = injective[0]
    assert full.ray_orbits == ((0, 1, 2, 3, 4, 5),)
    stab = full.orbit_stabilizer((0, 1, 2, 3, 4, 5))
    assert len(stab) == 2  # a reflection fixes ray 0


def test_kernel_reduction():
    aut = automorphism_group(P1XP1)
    classes = enumerate_hom_classes(GroupSpec.cyclic(4), aut)
    # pick a class that factors through C2
    factoring = [c for c in classes if len(c.kernel) == 2]
    assert factoring
    hom = factoring[0]
    quotient, induced, projection = kernel_reduction(hom)
    assert quotient.order == 2
    assert induced.is_injective
    assert projection == (0, 1, 0, 1)
    assert induced.matrix(1) == hom.matrix(1)
    assert induced.ray_orbits == hom.ray_orbits


def test_kernel_reduction_trivial_hom():
    aut = automorphism_group(P2)
    trivial = next(c for c in enumerate_hom_classes(GroupSpec.cyclic(2), aut) if c.is_trivial)
    quotient, induced, projection = kernel_reduction(trivial)
    assert quotient.order == 1
    assert projection == (0, 0)


def test_finite_field_backend_validation():
    FiniteFieldBackend(2, 2)
    FiniteFieldBackend(4, 3)  # prime power base
    FiniteFieldBackend(5, 3)
    with pytest.raises(AssertionError):
        FiniteFieldBackend(6, 2)
    with pytest.raises(AssertionError):
        FiniteFieldBackend(1, 2)
    assert FiniteFieldBackend(3, 2).mult_order == 8
    assert FiniteFieldBackend(2, 3).group.order == 3


def test_reduce_backend():
    assert reduce_backend(FiniteFieldBackend(2, 2), 1) == FiniteFieldBackend(2, 2)
    assert reduce_backend(FiniteFieldBackend(2, 2), 2) is None
    assert reduce_backend(FiniteFieldBackend(2, 6), 2) == FiniteFieldBackend(2, 3)
    assert reduce_backend(RealComplexBackend(), 2) is None
    sym = SymbolicBrauerBackend(2, (2,), ())
    assert reduce_backend(sym, 1) == sym
    with pytest.raises(BackendUnsupported):
        reduce_backend(sym, 2)


def test_torsion_factor_invertible():
    assert torsion_factor_invertible(RealComplexBackend(), 5)
    ff = FiniteFieldBackend(2, 2)  # units Z/3
    assert torsion_factor_invertible(ff, 2)
    assert not torsion_factor_invertible(ff, 3)


def test_norm_quotient_real():
    real = RealComplexBackend()
    full = frozenset({0, 1})
    triv = frozenset({0})
    assert norm_quotient(real, [full]) == FGAbelianGroup.trivial()
    assert norm_quotient(real, [triv, full]) == FGAbelianGroup.trivial()
    assert norm_quotient(real, [triv]) == FGAbelianGroup.cyclic(2)
    assert norm_quotient(real, [triv, triv, triv]) == FGAbelianGroup.cyclic(2)


def test_norm_quotient_finite_field_always_trivial():
    for q, d in [(2, 2), (3, 2), (2, 3), (5, 3), (4, 2)]:
        backend = FiniteFieldBackend(q, d)
        group = backend.group
        subgroup_list = [
            frozenset(group.subgroup_closure([g])) for g in range(d)
        ]
        for sub in subgroup_list:
            assert norm_quotient(backend, [sub]) == FGAbelianGroup.trivial()
        assert norm_quotient(backend, subgroup_list) == FGAbelianGroup.trivial()


def test_norm_quotient_symbolic_mirrors_real():
    # degree 2, Q = Z/2 with only the implicit subgroup data: behaves like C/R
    sym = SymbolicBrauerBackend(2, (2,), ())
    assert norm_quotient(sym, [frozenset({0, 1})]) == FGAbelianGroup.trivial()
    assert norm_quotient(sym, [frozenset({0})]) == FGAbelianGroup.cyclic(2)


def test_norm_quotient_symbolic_partial_subgroup():
    # degree 4, Q = Z/2 + Z/4; norms from the quadratic subfield hit the
    # subgroup generated by (1,0) and (0,2)
    half = frozenset({0, 2})
    gens = IntMatrix.from_cols([(1, 0), (0, 2)])
    sym = SymbolicBrauerBackend(4, (2, 4), ((half, gens),))
    got = norm_quotient(sym, [half])
    assert got == FGAbelianGroup.from_factors([2, 2])
    # combining with a trivial stabilizer (no condition) changes nothing
    assert norm_quotient(sym, [half, frozenset({0})]) == got
    # the full-group stabilizer kills everything
    assert norm_quotient(sym, [half, frozenset(range(4))]) == FGAbelianGroup.trivial()


def test_symbolic_monotonicity_enforced():
    half = frozenset({0, 2})
    with pytest.raises(AssumptionViolated):
        SymbolicBrauerBackend(
            4,
            (2,),
            (
                (half, IntMatrix.from_cols([], nrows=1)),
                (frozenset(range(4)), IntMatrix.identity(1)),
            ),
        )


def test_symbolic_from_json():
    text = """
    {
      "Q": {"invariant_factors": [2, 4]},
      "images": [
        {"subgroup_gens": [2], "subgroup_of_Q": [[1, 0], [0, 2]]}
      ]
    }
    """
    sym = SymbolicBrauerBackend.from_json(text, degree=4)
    assert sym.quotient_factors == (2, 4)
    assert sym.images[0][0] == frozenset({0, 2})
    assert norm_quotient(sym, [frozenset({0, 2})]) == FGAbelianGroup.from_factors([2, 2])


def test_backend_descriptions():
    assert "F_3" in FiniteFieldBackend(3, 2).describe()
    assert RealComplexBackend().describe() == "C/R"
    assert "degree 2" in SymbolicBrauerBackend(2, (2,), ()).describe()
