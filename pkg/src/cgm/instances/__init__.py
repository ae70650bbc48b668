"""Built-in instances and the named registry the CLI selects from."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..core import (
    CatGradedMonad,
    GeneralisedUnit,
    LawReport,
    TwoCatGradedMonad,
    check_laws,
)
from .ahl import AhlMonad, ahl_instance, broken_ahl_instance, sat_add
from .lockstate import LockPrims, concst_instance, lock_category, run_table
from .simple import (
    broken_graded_list_instance,
    graded_list_graded_monad,
    graded_list_instance,
    identity_instance,
    list_monad,
    list_sort_homomorphism,
    sorted_list_instance,
)
from .typedstate import (
    constructive_param,
    tstate_read,
    tstate_store,
    typed_state_param,
)

__all__ = [
    "AhlMonad", "InstanceBundle", "LockPrims", "ahl_instance",
    "broken_ahl_instance", "broken_graded_list_instance", "build_instance",
    "concst_instance", "constructive_param", "graded_list_graded_monad",
    "graded_list_instance", "identity_instance", "instance_names",
    "list_monad", "list_sort_homomorphism", "lock_category", "run_table",
    "sat_add", "sorted_list_instance", "tstate_read", "tstate_store",
    "typed_state_param",
]


@dataclass
class InstanceBundle:
    """Everything the harness and the metalanguage need for one instance."""

    name: str
    monad: CatGradedMonad
    two: TwoCatGradedMonad | None = None
    genunit: GeneralisedUnit | None = None
    ahl: AhlMonad | None = None

    def law_report(self, samples: int = 200, seed: int = 0) -> LawReport:
        report = check_laws(self.two if self.two is not None else self.monad,
                            samples=samples, seed=seed)
        if self.genunit is not None:
            report = report.merge(check_laws(self.genunit, samples=samples, seed=seed))
        return report


def _build_identity() -> InstanceBundle:
    return InstanceBundle("identity", identity_instance(lock_category()))


def _build_glist() -> InstanceBundle:
    two = graded_list_instance()
    return InstanceBundle("glist", two.base, two=two)


def _build_broken_glist() -> InstanceBundle:
    two = broken_graded_list_instance()
    return InstanceBundle("broken-glist", two.base, two=two)


def _build_concst() -> InstanceBundle:
    return InstanceBundle("concst", concst_instance())


def _build_tstate() -> InstanceBundle:
    P = typed_state_param({"A": 2, "B": 2})
    monad, gu = constructive_param(P)
    return InstanceBundle("tstate", monad, genunit=gu)


def _build_ahl() -> InstanceBundle:
    inst = ahl_instance()
    return InstanceBundle("ahl", inst.monad.base, two=inst.monad,
                          genunit=inst.genunit, ahl=inst)


def _build_broken_ahl() -> InstanceBundle:
    inst = broken_ahl_instance()
    return InstanceBundle("broken-ahl", inst.monad.base, two=inst.monad,
                          genunit=inst.genunit, ahl=inst)


_BUILDERS: dict[str, Callable[[], InstanceBundle]] = {
    "identity": _build_identity,
    "glist": _build_glist,
    "broken-glist": _build_broken_glist,
    "concst": _build_concst,
    "tstate": _build_tstate,
    "ahl": _build_ahl,
    "broken-ahl": _build_broken_ahl,
}


def instance_names() -> tuple[str, ...]:
    return tuple(_BUILDERS)


def build_instance(name: str) -> InstanceBundle:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown instance {name!r}; known: {', '.join(_BUILDERS)}")
    return builder()
