import pytest
from hypothesis import given, settings, strategies as st

from expsos.arith import ArithContext, random_modulus
from expsos.blind import VerificationTag, keygen
from expsos.cloud import ExponentShift, Honest, LazyReplay, RandomForger, local_worker
from expsos.errors import DomainError
from expsos.modexp_sos import ModExpQuery, Verdict, outsource_hcs, outsource_mm, outsource_ms, verify_ms


class Scripted:
    """Answers a fixed list of values in order, logging the queries."""

    def __init__(self, answers):
        self.answers = list(answers)
        self.queries = []

    def serve_modexp(self, q):
        self.queries.append(q)
        return self.answers.pop(0)


def test_example1_ms_session(example_key, golden):
    ctx = ArithContext()
    worker = local_worker()
    tag = VerificationTag(4, 12, 16)
    report = outsource_ms(example_key, 189, 346, 16, worker, ctx, tag=tag, r=146, k1=332, k2=68)
    assert report.verified is Verdict.ACCEPTED
    assert report.result == 190
    assert report.queries_sent == 2


def test_example1_errata_values(example_key):
    R1 = pow(63115, 143106, 171107)
    R2 = pow(63115, 30636, 171107)
    assert (R1, R2) == (81218, 55473)
    assert R1 != 81281
    assert verify_ms(example_key, 189, VerificationTag(4, 12, 16), R1, R2)
    assert pow(R1 % 431, 4, 431) * pow(189, 12, 431) % 431 == 305


def test_hcs_counts_three(example_key):
    report = outsource_hcs(example_key, 189, 346, local_worker(), ArithContext(1))
    assert report.result == 190 and report.local_mults == 3
    assert report.verified is Verdict.NOT_APPLICABLE


def test_mm_counts_three(example_key):
    report = outsource_mm(example_key, 189, 346, local_worker(), local_worker(), ArithContext(1))
    assert report.result == 190 and report.local_mults == 3
    assert report.verified is Verdict.ACCEPTED


def test_ms_query_order_follows_coin(example_key):
    for swapped in (False, True):
        tag = VerificationTag(2, 3, 4, swapped)
        R1, R2 = pow(189, 346, 431), pow(189, 2 * 346 + 3, 431)
        answers = [R2, R1] if swapped else [R1, R2]
        w = Scripted(answers)
        report = outsource_ms(example_key, 189, 346, 4, w, ArithContext(), tag=tag)
        assert report.verified is Verdict.ACCEPTED and report.result == 190
        # the affine exponent is the larger one for these tiny k
        first_is_affine = (w.queries[0].exponent - 2 * 346 - 3) % 430 == 0
        assert first_is_affine == swapped


def test_ms_rejection_hides_result(example_key):
    report = outsource_ms(example_key, 189, 346, 4, local_worker(LazyReplay()), ArithContext(7),
                          tag=VerificationTag(2, 1, 4))
    assert report.verified is Verdict.REJECTED and report.result is None


def test_mm_disagreement_rejected(example_key):
    report = outsource_mm(example_key, 189, 346, local_worker(), local_worker(RandomForger(seed=1)), ArithContext())
    assert report.verified is Verdict.REJECTED and report.result is None


def test_unit_tags_still_sound(example_key):
    report = outsource_ms(example_key, 5, 17, 4, local_worker(), ArithContext(2), tag=VerificationTag(1, 1, 4))
    assert report.verified is Verdict.ACCEPTED and report.result == pow(5, 17, 431)


def test_exponent_shift_caught_when_guess_wrong(example_key):
    # guess_bound=2 draws g=2; with t1=3 the shift cannot pass
    w = local_worker(ExponentShift(seed=0, guess_bound=2))
    report = outsource_ms(example_key, 189, 346, 4, w, ArithContext(), tag=VerificationTag(3, 1, 4))
    assert report.verified is Verdict.REJECTED


def test_exponent_shift_passes_when_guess_right(example_key):
    w = local_worker(ExponentShift(seed=0, guess_bound=2))
    report = outsource_ms(example_key, 189, 346, 4, w, ArithContext(), tag=VerificationTag(2, 1, 4, False))
    assert report.verified is Verdict.ACCEPTED
    assert report.result == pow(189, 347, 431) != 190


def test_input_validation(example_key, ctx):
    with pytest.raises(DomainError):
        outsource_hcs(example_key, 431, 3, local_worker(), ctx)
    with pytest.raises(DomainError):
        outsource_hcs(example_key, 3, 0, local_worker(), ctx)
    with pytest.raises(DomainError):
        outsource_ms(example_key, 3, 5, 1, local_worker(), ctx)
    with pytest.raises(DomainError):
        ModExpQuery(5, 1, 5)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), n_factors=st.sampled_from([1, 2]), B=st.sampled_from([2, 4, 16]))
def test_sessions_match_pow(seed, n_factors, B):
    ctx = ArithContext(seed)
    key = keygen(random_modulus(64, n_factors, ctx), None, ctx)
    u, a = ctx.randrange(0, key.N), ctx.randrange(1, key.N)
    expected = pow(u, a, key.N)
    worker = local_worker(Honest())
    assert outsource_hcs(key, u, a, worker, ctx).result == expected
    assert outsource_ms(key, u, a, B, worker, ctx).result == expected
    assert outsource_mm(key, u, a, worker, local_worker(), ctx).result == expected
