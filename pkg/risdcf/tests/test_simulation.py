import unittest
from io import StringIO

import numpy as npy
from nose.plugins.attrib import attr

import risdcf as rd
from risdcf.analytic import ContentionConfig
from risdcf.frame import RRTS
from risdcf.protocol import BackoffMode
from risdcf.simulation import (Simulator, SimMetrics, TraceRecord, DeadlockError,
                               run_simulation, measure_event_fractions,
                               relay_passivity_violations)
from risdcf.timing import MacTimings, RIS, CONVENTIONAL
from risdcf.topology import Topology


class SingleContenderTestCase(unittest.TestCase):
    '''
    One contender per hop at p=1 never collides, so every round is a
    success of known length.
    '''
    def setUp(self):
        self.topo = Topology.dual_hop(1, 1)
        self.always = BackoffMode.p_persistent(1.)

    def test_conventional_round(self):
        m = run_simulation(self.topo, backoff_mode=self.always, eta=None, max_slots=10)
        self.assertEqual(m.rounds, 10)
        self.assertEqual(m.success_count, 10)
        self.assertEqual(m.success_time_us, 10*18440)
        self.assertAlmostEqual(m.throughput_bps/(8000e6/18440), 1., places=12)

    def test_ris_round(self):
        m = run_simulation(self.topo, backoff_mode=self.always, eta=0.5, max_slots=10)
        self.assertEqual(m.success_count, 10)
        self.assertEqual(m.success_time_us, 10*17456)
        self.assertAlmostEqual(m.throughput_bps/(8000e6/17456), 1., places=12)

    def test_ris_off_below_threshold(self):
        sim = Simulator(self.topo, backoff_mode=self.always, eta=0.2, eta_threshold=0.5)
        self.assertFalse(sim.ris_enabled)
        m = sim.run(max_slots=5)
        self.assertEqual(m.success_time_us, 5*18440)

    def test_single_hop(self):
        m = run_simulation(Topology.chain(1, 1, 1), backoff_mode=self.always,
                           eta=None, max_slots=10)
        self.assertEqual(m.success_time_us, 10*9220)


class OutcomeTestCase(unittest.TestCase):
    '''
    '''
    def test_never_transmit(self):
        m = run_simulation(Topology.dual_hop(5, 6), backoff_mode=BackoffMode.p_persistent(0.),
                           max_slots=100)
        probs = measure_event_fractions(m)
        self.assertEqual(probs.p_i, 1.)
        self.assertEqual(m.idle_slots, 100)
        self.assertEqual(m.throughput_bps, 0.)
        self.assertEqual(m.elapsed_us, 100*50)

    def test_never_transmit_duration(self):
        m = run_simulation(Topology.dual_hop(5, 6), backoff_mode=BackoffMode.p_persistent(0.),
                           duration_us=10**4)
        # ticks at DIFS + k*slot up to the budget
        self.assertEqual(m.idle_slots, (10**4 - 128)//50)
        self.assertEqual(m.rounds, m.idle_slots)
        self.assertEqual(m.elapsed_us, m.idle_slots*50)

    def test_always_collide(self):
        m = run_simulation(Topology.dual_hop(2, 1), backoff_mode=BackoffMode.p_persistent(1.),
                           eta=None, max_slots=50)
        probs = measure_event_fractions(m)
        self.assertEqual(probs.p_c1, 1.)
        self.assertEqual(probs.p_i, 0.)
        self.assertEqual(m.collision1_time_us, 50*336)
        self.assertGreater(m.aborted_count, 0)

    def test_round_times_add_up(self):
        m = run_simulation(Topology.dual_hop(5, 6), max_slots=2000, seed=3)
        self.assertEqual(m.elapsed_us, m.idle_slots*m.slot_us + m.busy_time_us)
        self.assertEqual(m.rounds, 2000)

    def test_no_rounds(self):
        self.assertRaises(ValueError, measure_event_fractions, SimMetrics())


class DeterminismTestCase(unittest.TestCase):
    '''
    '''
    def test_same_seed(self):
        topo = Topology.dual_hop(5, 6)
        a = run_simulation(topo, max_slots=2000, seed=42)
        b = run_simulation(topo, max_slots=2000, seed=42)
        self.assertEqual(a, b)
        self.assertEqual(a.as_dict(), b.as_dict())

    def test_other_seed(self):
        topo = Topology.dual_hop(5, 6)
        a = run_simulation(topo, max_slots=2000, seed=1)
        b = run_simulation(topo, max_slots=2000, seed=2)
        self.assertNotEqual(a, b)


class PassivityTestCase(unittest.TestCase):
    '''
    '''
    def test_relay_stays_passive(self):
        activated = 0
        for seed in range(20):
            sim = Simulator(Topology.dual_hop(5, 6), seed=seed, keep_trace=True)
            sim.run(max_slots=500)
            self.assertEqual(relay_passivity_violations(sim.trace_records), [])
            activated += sum(1 for r in sim.trace_records if r.kind == 'ris-active')
        self.assertGreater(activated, 0)

    def test_violation_detected(self):
        recs = [TraceRecord(0, 2, 'ris-active', '-', '-'),
                TraceRecord(10, 2, 'start', 'Ack', 'RA=1'),
                TraceRecord(20, 2, 'ris-release', '-', '-'),
                TraceRecord(30, 2, 'start', 'RRts', 'RA=3')]
        self.assertEqual(relay_passivity_violations(recs), [recs[1]])


class GridAlignmentTestCase(unittest.TestCase):
    '''
    After any failed reservation the first-hop contenders sense on the
    first receiver's grid.
    '''
    def test_sources_on_observer_grid(self):
        topo = Topology.dual_hop(3, 3)
        sim = Simulator(topo, backoff_mode=BackoffMode.p_persistent(.3), eta=0.5,
                        seed=5, keep_trace=True)
        m = sim.run(max_slots=3000)
        self.assertGreater(m.collision_count_hop2, 0)
        ticks = set(r.time_us for r in sim.trace_records if r.kind == 'round')
        starts = [r for r in sim.trace_records
                  if r.kind == 'start' and r.node in topo.sources and r.variant == RRTS]
        self.assertTrue(starts)
        self.assertEqual([r for r in starts if r.time_us not in ticks], [])

    def test_second_hop_collision_time(self):
        # one contender per hop at p=1 reserves every round and the aligned
        # interferer always collides at the destination
        t = MacTimings()
        m = run_simulation(Topology.dual_hop(1, 2), t, BackoffMode.p_persistent(1.),
                           eta=0.5, max_slots=20, retry_limit=100)
        self.assertEqual(m.collision_count_hop2, 20)
        self.assertEqual(m.collision2_time_us, 20*(2*t.rrts_us + t.sifs_us + t.difs_us))


class BudgetTestCase(unittest.TestCase):
    '''
    '''
    def setUp(self):
        self.sim = Simulator(Topology.dual_hop(5, 6))

    def test_budget_required(self):
        self.assertRaises(ValueError, self.sim.run)
        self.assertRaises(ValueError, self.sim.run, max_slots=0)
        self.assertRaises(ValueError, self.sim.run, duration_us=-1)

    def test_duration(self):
        m = self.sim.run(duration_us=10**5)
        self.assertLessEqual(self.sim.env.now, 10**5)
        self.assertGreater(m.rounds, 0)

    def test_trace_file(self):
        out = StringIO()
        Simulator(Topology.dual_hop(2, 2), trace=out).run(max_slots=50)
        lines = out.getvalue().splitlines()
        self.assertTrue(lines)
        self.assertTrue(all(len(l.split('\t')) == 5 for l in lines))
        self.assertFalse(out.closed)

    def test_deadlock_is_runtime_error(self):
        self.assertTrue(issubclass(DeadlockError, RuntimeError))


@attr('slow')
class ConvergenceTestCase(unittest.TestCase):
    '''
    Long p-persistent runs against the saturation model.
    '''
    slots = 10**6

    def setUp(self):
        self.t = MacTimings()

    def test_throughput_grid(self):
        for p in (0.05, 0.1, 0.2):
            for L, K in ((2, 2), (5, 6), (10, 10)):
                for mode, eta in ((RIS, 0.5), (CONVENTIONAL, None)):
                    with self.subTest(p=p, L=L, K=K, mode=mode):
                        topo = Topology.dual_hop(L, K, ris_available=mode == RIS)
                        m = run_simulation(topo, self.t, BackoffMode.p_persistent(p),
                                           eta, max_slots=self.slots, seed=7)
                        s = rd.multihop_throughput(ContentionConfig(p, L, K), self.t,
                                                   mode, 0.5).throughput_bps
                        self.assertLess(abs(m.throughput_bps - s)/s, 0.05)

    def test_hand_value(self):
        m = run_simulation(Topology.dual_hop(5, 6), self.t, BackoffMode.p_persistent(.1),
                           0.5, max_slots=self.slots, seed=11)
        self.assertLess(abs(m.throughput_bps/1e6 - 0.44085)/0.44085, 0.05)

    def test_event_fractions(self):
        rng = npy.random.default_rng(2024)
        triples = [(round(float(rng.uniform(0.02, 0.3)), 3), int(rng.integers(2, 11)),
                    int(rng.integers(2, 11))) for k in range(5)]
        for p, L, K in triples:
            with self.subTest(p=p, L=L, K=K):
                m = run_simulation(Topology.dual_hop(L, K), self.t,
                                   BackoffMode.p_persistent(p), 0.5,
                                   max_slots=self.slots, seed=3)
                probs = measure_event_fractions(m)
                ref = rd.contention_probabilities(ContentionConfig(p, L, K))
                for name in ('p_i', 'p_s1', 'p_c1'):
                    q = getattr(ref, name)
                    se = npy.sqrt(q*(1 - q)/m.rounds)
                    self.assertLessEqual(abs(getattr(probs, name) - q), 3*se, name)
                n = m.hop2_attempt_count
                se = npy.sqrt(ref.p_s2*(1 - ref.p_s2)/n)
                self.assertLessEqual(abs(probs.p_s2 - ref.p_s2), 3*se, 'p_s2')
