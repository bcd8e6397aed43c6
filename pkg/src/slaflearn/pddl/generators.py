"""Problem files of adjustable size for the bundled domains, used by the benchmark sweep."""

from __future__ import annotations


def _problem(name: str, domain: str, objects: list[str], init: list[str]) -> str:
    return (
        f"(define (problem {name})\n  (:domain {domain})\n"
        f"  (:objects {' '.join(objects)})\n"
        f"  (:init {' '.join(init)}))\n"
    )


def blocksworld(n: int) -> str:
    """n blocks stacked in towers of at most three."""
    if n < 1:
        raise ValueError("need at least one block")
    blocks = [f"b{i}" for i in range(n)]
    init = ["(arm-empty)"]
    for start in range(0, n, 3):
        tower = blocks[start:start + 3]
        init.append(f"(on-table {tower[0]})")
        init += [f"(on {top} {below})" for below, top in zip(tower, tower[1:])]
        init.append(f"(clear {tower[-1]})")
    return _problem(f"bw-{n}", "blocksworld", [" ".join(blocks) + " - object"], init)


def driverlog(n: int) -> str:
    """n locations on a path with 2 drivers, 3 trucks and 8 packages."""
    if n < 2:
        raise ValueError("need at least two locations")
    locs = [f"s{i}" for i in range(n)]
    init = ["(at driver1 s0)", f"(at driver2 {locs[n // 2]})"]
    for t in range(1, 4):
        init += [f"(at truck{t} {locs[(3 * t - 2) % n]})", f"(empty truck{t})"]
    init += [f"(at package{p} {locs[(p - 1) % n]})" for p in range(1, 9)]
    for a, b in zip(locs, locs[1:]):
        init += [f"(path {a} {b})", f"(path {b} {a})"]
    objects = ["driver1 driver2 - driver", "truck1 truck2 truck3 - truck",
               " ".join(f"package{p}" for p in range(1, 9)) + " - obj", " ".join(locs) + " - location"]
    return _problem(f"dlog-{n}", "driverlog", objects, init)


def zenotravel(n: int) -> str:
    """n cities, 4 persons, 1 aircraft, 6 fuel levels."""
    if n < 2:
        raise ValueError("need at least two cities")
    cities = [f"city{i}" for i in range(n)]
    init = ["(at-aircraft plane1 city0)", "(fuel-level plane1 fl3)"]
    init += [f"(at-person person{p} {cities[(2 * p) % n]})" for p in range(1, 5)]
    init += [f"(next fl{i} fl{i + 1})" for i in range(5)]
    objects = ["plane1 - aircraft", "person1 person2 person3 person4 - person",
               " ".join(cities) + " - city", " ".join(f"fl{i}" for i in range(6)) + " - flevel"]
    return _problem(f"zeno-{n}", "zeno-travel", objects, init)


def depots(n: int) -> str:
    """n crates on three pallets, one depot, two distributors, two trucks, three hoists."""
    if n < 1:
        raise ValueError("need at least one crate")
    places = ["depot0", "distributor0", "distributor1"]
    init = []
    for i, p in enumerate(places):
        init += [f"(at pallet{i} {p})", f"(at hoist{i} {p})", f"(available hoist{i})"]
    init += ["(at truck0 distributor1)", "(at truck1 depot0)"]
    tops = [f"pallet{i}" for i in range(3)]
    for c in range(n):
        i = c % 3
        init += [f"(at crate{c} {places[i]})", f"(on crate{c} {tops[i]})"]
        tops[i] = f"crate{c}"
    init += [f"(clear {t})" for t in tops]
    objects = ["depot0 - depot", "distributor0 distributor1 - distributor", "truck0 truck1 - truck",
               "pallet0 pallet1 pallet2 - pallet", " ".join(f"crate{c}" for c in range(n)) + " - crate",
               "hoist0 hoist1 hoist2 - hoist"]
    return _problem(f"depot-{n}", "depot", objects, init)


GENERATORS = {
    "blocksworld": blocksworld,
    "driverlog": driverlog,
    "zenotravel": zenotravel,
    "depots": depots,
}
