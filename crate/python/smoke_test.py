"""Smoke test for the pycoopstore extension.

Build and install first, e.g. ``pip install --no-build-isolation ./crates/python``.
"""

import itertools
import random

import pycoopstore as cs


def main():
    code = cs.StableCode(6, 3, 2, p=11)
    assert code.params["file_size"] == 6 and code.params["alpha"] == 2

    rng = random.Random(7)
    message = [rng.randrange(11) for _ in range(6)]
    shards = code.encode(message)
    assert sorted(shards) == [1, 2, 3, 4, 5, 6]

    for subset in itertools.combinations(shards, 3):
        assert code.reconstruct({n: shards[n] for n in subset}) == message

    survivors = {n: s for n, s in shards.items() if n not in (1, 2)}
    out = code.repair([1, 2], survivors)
    assert out["shards"] == {1: shards[1], 2: shards[2]}
    assert out["downloaded"] + out["exchanged"] == 8
    assert code.is_stable()

    table = {(l1, l2): measured for l1, l2, _, measured, hi, predicted in code.capacity_table() if measured == hi == predicted}
    assert table == {(0, 0): 6, (1, 0): 4, (2, 0): 2, (0, 1): 2, (1, 1): 1, (0, 2): 0}, table

    leak = code.leakage([1], [2])
    assert (leak["leaked"], leak["capacity"], leak["predicted"]) == (5, 1, 1)

    assert cs.predicted_capacity(6, 3, 2, 1, 1) == 1
    assert cs.bandwidth(6, 3, 3, 2, 6) == ("12", "8")

    a = cs.code_a_attack(3, p=11, omega=2, seed=1)
    assert a["exact"] and a["leaked"] == 6
    b = cs.code_b_attack(6, 3, 2, seed=1)
    assert b["exact"] and b["leaked"] == 6 and not b["stable"]

    assert cs.verify_secrecy(6, 3, 2, 1, 1) == (1, 30, 30)

    try:
        cs.code_a_attack(3, p=13, omega=2)
    except ValueError as e:
        assert "inadmissible" in str(e)
    else:
        raise AssertionError("inadmissible omega accepted")

    print("pycoopstore smoke test: ok")


if __name__ == "__main__":
    main()
