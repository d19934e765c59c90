import numpy as np
from hypothesis import given, settings, strategies as st

from groupsim.rng import ALLOCATION, ANSWERS, Stream


def test_same_key_same_sequence():
    a = Stream.for_run(5, 2, ANSWERS)
    b = Stream.for_run(5, 2, ANSWERS)
    assert [a.random() for _ in range(50)] == [b.random() for _ in range(50)]


def test_different_keys_differ():
    base = [Stream.for_run(5, 0, ANSWERS).random() for _ in range(3)]
    assert base != [Stream.for_run(5, 1, ANSWERS).random() for _ in range(3)]
    assert base != [Stream.for_run(5, 0, ALLOCATION).random() for _ in range(3)]
    assert base != [Stream.for_run(6, 0, ANSWERS).random() for _ in range(3)]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=5000), min_size=1, max_size=8))
def test_vector_and_scalar_draws_interleave(chunks):
    s1 = Stream.for_run(3, 0, ANSWERS)
    s2 = Stream.for_run(3, 0, ANSWERS)
    got = []
    for k, size in enumerate(chunks):
        if k % 2:
            got.extend(s1.randoms(size).tolist())
        else:
            got.extend(s1.random() for _ in range(size))
    want = [s2.random() for _ in range(sum(chunks))]
    assert got == want


def test_matches_plain_generator():
    seq = np.random.SeedSequence(9, spawn_key=(4, 1))
    ref = np.random.Generator(np.random.PCG64(seq)).random(5000)
    s = Stream.for_run(9, 4, 1)
    assert np.array_equal(np.array([s.random() for _ in range(5000)]), ref)


def test_shuffle_is_permutation_and_uniformish():
    s = Stream.for_run(1, 0, ALLOCATION)
    counts = np.zeros((3, 3))
    for _ in range(6000):
        out = s.shuffled([0, 1, 2])
        assert sorted(out) == [0, 1, 2]
        for pos, v in enumerate(out):
            counts[pos, v] += 1
    assert np.allclose(counts / 6000, 1 / 3, atol=0.03)


def test_shuffle_draw_count():
    a = Stream.for_run(1, 0, 0)
    b = Stream.for_run(1, 0, 0)
    a.shuffled(range(5))
    for _ in range(4):
        b.random()
    assert a.random() == b.random()


def test_normal_moments():
    s = Stream.for_run(2, 0, 0)
    x = np.array([s.normal() for _ in range(20000)])
    assert abs(x.mean()) < 0.03 and abs(x.std() - 1) < 0.03
