import unittest

import numpy as npy
from numpy.testing import assert_allclose

import risdcf as rd
from risdcf.analytic import (ContentionConfig, ContentionConfigError,
                             ConvergenceError)
from risdcf.timing import MacTimings, RIS, CONVENTIONAL


def hand_throughput(p, L, K, t_s, t_c1, t_c2, slot=50., payload=8000.):
    '''
    dual-hop saturation throughput in Mbps, evaluated term by term
    '''
    p_i = (1 - p)**L
    p_s1 = L*p*(1 - p)**(L - 1)
    p_c1 = 1 - p_i - p_s1
    p_s2 = (1 - p)**(K - 1)
    p_c2 = 1 - p_s2
    num = p_s1*p_s2*payload
    den = p_i*slot + p_c1*t_c1 + p_s1*p_c2*t_c2 + p_s1*p_s2*t_s
    return num/den


class ProbabilitiesTestCase(unittest.TestCase):
    '''
    '''
    def test_reference_point(self):
        probs = rd.contention_probabilities(ContentionConfig(0.1, 5, 6))
        assert_allclose([probs.p_i, probs.p_s1, probs.p_c1, probs.p_s2, probs.p_c2],
                        [0.59049, 0.32805, 0.08146, 0.59049, 0.40951], rtol=1e-9)

    def test_sum_to_one(self):
        for p, L, K in [(.03, 2, 9), (.5, 7, 2), (.9, 30, 30), (1., 1, 1)]:
            probs = rd.contention_probabilities(ContentionConfig(p, L, K))
            self.assertAlmostEqual(probs.p_i + probs.p_s1 + probs.p_c1, 1.)
            self.assertAlmostEqual(probs.p_s2 + probs.p_c2, 1.)
            self.assertGreaterEqual(probs.p_c1, 0.)

    def test_p_zero(self):
        probs = rd.contention_probabilities(ContentionConfig(0., 5, 6))
        self.assertEqual(probs.p_i, 1.)
        self.assertEqual(probs.p_s1, 0.)

    def test_as_dict(self):
        d = rd.contention_probabilities(ContentionConfig()).as_dict()
        self.assertEqual(list(d.keys()), ['p_i', 'p_s1', 'p_c1', 'p_s2', 'p_c2'])

    def test_invalid(self):
        self.assertRaises(ContentionConfigError, ContentionConfig, p=1.5)
        self.assertRaises(ContentionConfigError, ContentionConfig, L=0)
        self.assertRaises(ContentionConfigError, ContentionConfig, m_hops=0)

    def test_copy(self):
        cfg = ContentionConfig().copy(L=8)
        self.assertEqual((cfg.p, cfg.L, cfg.K), (0.1, 8, 6))


class DualHopTestCase(unittest.TestCase):
    '''
    '''
    def setUp(self):
        self.t = MacTimings()
        self.probs = rd.contention_probabilities(ContentionConfig(0.1, 5, 6))
        self.ris, self.conv = rd.timing_sets(self.t, 0.5)

    def test_ris_reference(self):
        s = rd.dual_hop_throughput(self.probs, self.ris, self.t)
        assert_allclose(s.throughput_mbps,
                        hand_throughput(.1, 5, 6, 17456., 336., 572.), rtol=1e-9)
        assert_allclose(s.throughput_mbps, 0.44086, rtol=1e-4)
        self.assertEqual(s.mode, RIS)

    def test_conventional_reference(self):
        s = rd.dual_hop_throughput(self.probs, self.conv, self.t)
        assert_allclose(s.throughput_mbps,
                        hand_throughput(.1, 5, 6, 18440., 336., 336.), rtol=1e-9)
        assert_allclose(s.throughput_mbps, 0.42179, rtol=1e-4)

    def test_gain(self):
        s_r = rd.dual_hop_throughput(self.probs, self.ris, self.t)
        s_c = rd.dual_hop_throughput(self.probs, self.conv, self.t)
        assert_allclose(rd.throughput_gain(s_r, s_c), 1.0452, rtol=1e-4)
        self.assertEqual(rd.throughput_gain(s_r, s_c),
                         rd.throughput_gain(s_r.throughput_bps, s_c.throughput_bps))
        self.assertRaises(ZeroDivisionError, rd.throughput_gain, 1., 0.)

    def test_denominator_terms(self):
        s = rd.dual_hop_throughput(self.probs, self.ris, self.t)
        terms = s.denominator_terms_us
        self.assertEqual(list(terms.keys()),
                         ['idle', 'collision_hop1', 'collision_hop2', 'success'])
        assert_allclose(terms['idle'], 0.59049*50)
        assert_allclose(s.numerator_bits/s.denominator_us*1e6, s.throughput_bps)

    def test_no_contention(self):
        # one contender per hop at p=1 succeeds every round
        probs = rd.contention_probabilities(ContentionConfig(1., 1, 1))
        s = rd.dual_hop_throughput(probs, self.conv, self.t)
        assert_allclose(s.throughput_bps, 8000e6/18440)

    def test_p_zero_gives_zero(self):
        probs = rd.contention_probabilities(ContentionConfig(0., 5, 6))
        self.assertEqual(rd.dual_hop_throughput(probs, self.ris, self.t).throughput_bps, 0.)

    def test_crossing_exists(self):
        ris_wins = conv_wins = False
        for L in range(2, 31):
            for K in range(2, 31):
                probs = rd.contention_probabilities(ContentionConfig(0.1, L, K))
                s_r = rd.dual_hop_throughput(probs, self.ris, self.t).throughput_bps
                s_c = rd.dual_hop_throughput(probs, self.conv, self.t).throughput_bps
                ris_wins |= s_r > s_c
                conv_wins |= s_c > s_r
        self.assertTrue(ris_wins)
        self.assertTrue(conv_wins)


class BianchiTestCase(unittest.TestCase):
    '''
    '''
    def test_single_contender(self):
        assert_allclose(rd.bianchi_transmission_probability(32, 3, 1), 2./33, rtol=1e-9)

    def test_fixed_point(self):
        for W, n, c in [(32, 3, 5), (16, 5, 20), (8, 0, 3), (256, 3, 2)]:
            tau, q = rd.bianchi_fixed_point(W, n, c)
            self.assertTrue(0 < tau < 1)
            self.assertLess(abs(rd.bianchi_residual(tau, W, n, c)), 1e-8)
            assert_allclose(q, 1 - (1 - tau)**(c - 1))

    def test_decreasing_in_window(self):
        taus = [rd.bianchi_transmission_probability(W, 3, 5) for W in (8, 16, 32, 64)]
        self.assertTrue(all(a > b for a, b in zip(taus[:-1], taus[1:])))

    def test_no_convergence(self):
        self.assertRaises(ConvergenceError, rd.bianchi_fixed_point, 32, 3, 10,
                          max_iter=1)

    def test_invalid(self):
        self.assertRaises(ValueError, rd.bianchi_fixed_point, 0, 3, 5)
        self.assertRaises(ValueError, rd.bianchi_fixed_point, 32, -1, 5)
        self.assertRaises(ValueError, rd.bianchi_fixed_point, 32, 3, 0)
        self.assertRaises(ValueError, rd.bianchi_fixed_point, 32, 3, 5, damping=0)


class MultihopTestCase(unittest.TestCase):
    '''
    '''
    def setUp(self):
        self.t = MacTimings()
        self.ris, self.conv = rd.timing_sets(self.t, 0.5)

    def test_success_times(self):
        self.assertEqual(
            [rd.multihop_success_time(m, self.ris, self.conv) for m in (1, 2, 3, 4)],
            [9220, 17456, 26676, 34912])
        self.assertEqual(rd.multihop_success_time(3, self.ris, self.conv, CONVENTIONAL),
                         3*9220)
        self.assertRaises(ValueError, rd.multihop_success_time, 0, self.ris, self.conv)

    def test_collision_times(self):
        self.assertEqual(rd.multihop_collision_time(1, RIS, self.t), 336)
        self.assertEqual(rd.multihop_collision_time(2, RIS, self.t), 572)
        self.assertEqual(rd.multihop_collision_time(3, RIS, self.t), 336)
        self.assertEqual(rd.multihop_collision_time(2, CONVENTIONAL, self.t), 336)
        self.assertRaises(ValueError, rd.multihop_collision_time, 0, RIS, self.t)

    def test_two_hops_equal_dual_hop(self):
        cfg = ContentionConfig(0.1, 5, 6, 2)
        probs = rd.contention_probabilities(cfg)
        for mode, times in ((RIS, self.ris), (CONVENTIONAL, self.conv)):
            self.assertEqual(
                rd.multihop_throughput(cfg, self.t, mode, 0.5).throughput_bps,
                rd.dual_hop_throughput(probs, times, self.t).throughput_bps)

    def test_conventional_nonincreasing(self):
        s = [rd.multihop_throughput(ContentionConfig(0.1, 5, 6, m), self.t,
                                    CONVENTIONAL).throughput_bps
             for m in range(1, 9)]
        self.assertTrue(all(a >= b for a, b in zip(s[:-1], s[1:])))

    def test_optimal_probability(self):
        cfg = ContentionConfig(0.1, 5, 6, 2)
        for mode in (RIS, CONVENTIONAL):
            p_opt, s_opt = rd.optimal_transmission_probability(cfg, self.t, mode, 0.5)
            self.assertTrue(0 < p_opt < 1)
            for p in npy.linspace(0.01, 0.99, 50):
                s = rd.multihop_throughput(cfg.copy(p=p), self.t, mode, 0.5).throughput_bps
                self.assertLessEqual(s, s_opt*(1 + 1e-6))
