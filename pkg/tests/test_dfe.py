"""Equalizer state-machine tests: quantizer, combiner, stepping, invariants."""

import numpy as np
import pytest

from equalab import (
    ConfigurationError,
    DfeConfig,
    DfeState,
    InputError,
    combiner,
    delay_line,
    dfe_step,
    form_error,
    initial_state,
    quantize,
    run_equalizer,
    taps,
)
from equalab.dfe import MODE_TRAINED


def cfg_dd(**kw):
    base = dict(n_ff=2, n_fb=0, mu=0.1)
    base.update(kw)
    return DfeConfig(**base)


class TestDfeConfig:
    @pytest.mark.parametrize(
        "kw,field",
        [
            (dict(n_ff=0), "n_ff"),
            (dict(n_fb=-1), "n_fb"),
            (dict(mu=0.0), "mu"),
            (dict(algo="rls"), "algo"),
            (dict(mode="blind"), "mode"),
            (dict(training_len=5), "training_len"),
            (dict(decision_delay=-1), "decision_delay"),
            (dict(step_floor=-0.5), "step_floor"),
        ],
    )
    def test_rejects_bad_fields(self, kw, field):
        base = dict(n_ff=4, n_fb=2, mu=0.1)
        base.update(kw)
        with pytest.raises(ConfigurationError) as exc:
            DfeConfig(**base)
        assert exc.value.field == field

    def test_training_len_requires_trained_mode(self):
        DfeConfig(n_ff=4, n_fb=2, mu=0.1, mode="trained", training_len=5)

    def test_default_delay_is_ff_half_length(self):
        assert DfeConfig(n_ff=11, n_fb=5, mu=0.1).delay == 5
        assert DfeConfig(n_ff=1, n_fb=0, mu=0.1).delay == 0
        assert DfeConfig(n_ff=4, n_fb=0, mu=0.1, decision_delay=2).delay == 2

    def test_spike_needs_delay_inside_ff(self):
        with pytest.raises(ConfigurationError):
            DfeConfig(n_ff=3, n_fb=0, mu=0.1, decision_delay=3, center_spike=True)

    def test_initial_state_spike(self):
        st = initial_state(DfeConfig(n_ff=5, n_fb=2, mu=0.1, center_spike=True))
        assert st.ff_weights.tolist() == [0.0, 0.0, 1.0, 0.0, 0.0]
        assert st.fb_weights.tolist() == [0.0, 0.0]
        assert st.prev_error == 0.0 and st.iteration == 0


class TestQuantize:
    def test_positive_maps_to_plus_one(self):
        assert quantize(0.3) == 1.0

    def test_negative_maps_to_minus_one(self):
        assert quantize(-0.7) == -1.0

    def test_zero_tie_break(self):
        assert quantize(0.0) == 1.0

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            quantize(float("nan"))


class TestCombiner:
    def test_zero_weights_zero_output(self):
        st = initial_state(DfeConfig(n_ff=3, n_fb=2, mu=0.1))
        y, _ = combiner(st, 5.0)
        assert y == 0.0

    def test_no_feedback_is_plain_ff(self):
        st = DfeState(taps([0.5, 0.25]), np.zeros(0), delay_line(2), delay_line(0))
        y, _ = combiner(st, 2.0)
        assert y == 1.0  # 0.5*2 + 0.25*0

    def test_hand_ff_minus_fb(self):
        st = DfeState(taps([1.0]), taps([0.5]), delay_line(1), np.array([1.0]))
        y, mid = combiner(st, 1.0)
        assert y == 0.5
        assert mid.ff_line.tolist() == [1.0]
        # feedback line must not advance inside the combiner
        assert mid.fb_line.tolist() == [1.0]


class TestFormError:
    def test_hand_values(self):
        assert form_error(0.6, 1.0) == pytest.approx(0.4, abs=1e-15)
        assert form_error(1.0, 1.0) == 0.0

    def test_decision_directed_sign(self):
        y = -0.2
        ref = quantize(y)
        assert ref == -1.0
        assert form_error(y, ref) == pytest.approx(-0.8, abs=1e-15)


class TestDfeStep:
    def test_cold_start(self):
        cfg = cfg_dd(n_ff=3, n_fb=2)
        trace, nxt = dfe_step(initial_state(cfg), 0.7, None, cfg)
        assert trace.combiner_out == 0.0
        assert trace.decision == 1.0
        assert trace.error == 1.0
        assert nxt.iteration == 1
        assert nxt.prev_error == 1.0

    def test_hand_lms_step(self):
        # FF line becomes [1, -1] after shifting in 1; zero weights give y=0,
        # decision +1, e=1, so conventional LMS lands on [0.1, -0.1].
        cfg = cfg_dd()
        st = DfeState(np.zeros(2), np.zeros(0), np.array([-1.0, 9.0]), delay_line(0))
        trace, nxt = dfe_step(st, 1.0, None, cfg)
        assert trace.error == 1.0
        assert nxt.ff_weights.tolist() == [0.1, -0.1]

    def test_improved_unit_difference_coincides(self):
        cfg = cfg_dd(algo="improved")
        st = DfeState(np.zeros(2), np.zeros(0), np.array([-1.0, 9.0]), delay_line(0))
        trace, nxt = dfe_step(st, 1.0, None, cfg)
        assert trace.effective_step == 0.1
        assert nxt.ff_weights.tolist() == [0.1, -0.1]

    def test_training_requires_reference(self):
        cfg = cfg_dd(mode="trained", training_len=3)
        with pytest.raises(InputError):
            dfe_step(initial_state(cfg), 0.5, None, cfg)

    def test_training_reference_must_be_symbol(self):
        cfg = cfg_dd(mode="trained", training_len=3)
        with pytest.raises(InputError):
            dfe_step(initial_state(cfg), 0.5, 0.5, cfg)

    def test_decision_enters_feedback_line(self):
        cfg = cfg_dd(n_ff=2, n_fb=3)
        st = initial_state(cfg)
        decisions = []
        rng = np.random.default_rng(1)
        for r in rng.normal(size=8):
            trace, st = dfe_step(st, float(r), None, cfg)
            decisions.append(trace.decision)
        assert st.fb_line.tolist() == decisions[-1:-4:-1]

    def test_decisions_are_symbols(self):
        cfg = cfg_dd(n_ff=4, n_fb=2, algo="improved")
        st = initial_state(cfg)
        rng = np.random.default_rng(2)
        for r in rng.normal(size=100):
            trace, st = dfe_step(st, float(r), None, cfg)
            assert trace.decision in (-1.0, 1.0)
            assert trace.effective_step >= 0.0

    def test_perfect_decision_is_fixed_point(self):
        for algo in ("conventional", "improved"):
            cfg = cfg_dd(n_ff=1, n_fb=0, algo=algo)
            st = DfeState(taps([1.0]), np.zeros(0), delay_line(1), delay_line(0), prev_error=0.3)
            trace, nxt = dfe_step(st, 1.0, None, cfg)
            assert trace.combiner_out == 1.0 and trace.error == 0.0
            assert nxt.ff_weights.tobytes() == st.ff_weights.tobytes()

    def test_trained_and_decision_directed_agree_on_correct_decisions(self):
        rng = np.random.default_rng(3)
        for algo in ("conventional", "improved"):
            dd = DfeConfig(n_ff=4, n_fb=2, mu=0.07, algo=algo)
            tr = DfeConfig(n_ff=4, n_fb=2, mu=0.07, algo=algo, mode="trained", training_len=10)
            st = DfeState(
                rng.normal(size=4), rng.normal(size=2), rng.normal(size=4),
                np.sign(rng.normal(size=2)) + 0.0, prev_error=float(rng.normal()),
            )
            r = float(rng.normal())
            y, _ = combiner(st, r)
            true_symbol = quantize(y)  # decision happens to be correct
            t_dd, s_dd = dfe_step(st, r, None, dd)
            t_tr, s_tr = dfe_step(st, r, true_symbol, tr)
            assert t_dd.error == t_tr.error
            assert s_dd.ff_weights.tobytes() == s_tr.ff_weights.tobytes()
            assert s_dd.fb_weights.tobytes() == s_tr.fb_weights.tobytes()


class TestRunEqualizer:
    def test_rejects_empty_input(self):
        with pytest.raises(InputError):
            run_equalizer(np.array([]), cfg_dd())

    def test_trained_mode_needs_symbols(self):
        cfg = cfg_dd(mode="trained", training_len=4)
        with pytest.raises(InputError):
            run_equalizer(np.ones(10), cfg)

    def test_matches_manual_stepping(self):
        cfg = DfeConfig(n_ff=5, n_fb=3, mu=0.05, algo="improved", center_spike=True)
        rng = np.random.default_rng(4)
        rx = rng.normal(size=50)
        run = run_equalizer(rx, cfg)
        st = initial_state(cfg)
        for i, r in enumerate(rx):
            trace, st = dfe_step(st, float(r), None, cfg)
            assert run.sq_errors[i] == trace.error * trace.error
            assert run.decisions[i] == trace.decision

    def test_trained_references_are_delayed_symbols(self):
        # delay 2: reference stream is [pad, pad, tx0, tx1, ...] during training
        cfg = DfeConfig(n_ff=5, n_fb=0, mu=1e-9, mode="trained", training_len=6)
        tx = np.array([-1.0, -1.0, -1.0, -1.0, -1.0, -1.0])
        run = run_equalizer(np.zeros(6), cfg, transmitted=tx)
        # y stays ~0, so e = reference: +1 padding for 2 steps then -1
        np.testing.assert_allclose(
            np.sqrt(run.sq_errors), [1, 1, 1, 1, 1, 1], atol=1e-8
        )
        st = initial_state(cfg)
        refs = []
        for i, r in enumerate(np.zeros(6)):
            ts = tx[i - 2] if i >= 2 else 1.0
            trace, st = dfe_step(st, float(r), ts if i < 6 else None, cfg)
            refs.append(trace.error)
        assert refs[:2] == [1.0, 1.0] and refs[2:] == [-1.0] * 4

    def test_degenerate_linear_mode_matches_fir(self):
        # No feedback and a vanishing step: outputs equal the fixed FF filter.
        rng = np.random.default_rng(5)
        rx = rng.normal(size=200)
        cfg = DfeConfig(n_ff=7, n_fb=0, mu=1e-300, center_spike=True)
        st = initial_state(cfg)
        w0 = st.ff_weights.copy()
        outs = np.empty(rx.size)
        for i, r in enumerate(rx):
            trace, st = dfe_step(st, float(r), None, cfg)
            outs[i] = trace.combiner_out
        expected = np.convolve(rx, w0)[: rx.size]
        np.testing.assert_allclose(outs, expected, atol=1e-12, rtol=0)
