import unittest
import warnings

import risdcf as rd
from risdcf.frame import Frame, RRTS, RCTS, DATA, ACK
from risdcf.protocol import (BackoffMode, ProtocolConfig, NodeState, Indication,
                             ProtocolViolationWarning, node_step, sender_step,
                             receiver_step, apply_nav_min_rule, apply_nav_reset,
                             TransmitFrame, SetTimer, AdjustRisPhase,
                             ReleaseRisLink, DeliverPayload, AbortTransfer,
                             TransferComplete,
                             IDLE, BACKOFF, AWAIT_RCTS, AWAIT_DATA, AWAIT_ACK,
                             RELAY_AWAIT_RCTS, RELAY_RIS_ACTIVE,
                             RELAY_STORE_FORWARD, SEND, SLOT, BUSY, FRAME,
                             TIMER, RESPONSE, RIS_LINK, P_PERSISTENT,
                             EXPONENTIAL)

S, R, D, X = 1, 2, 3, 9


def frames_of(actions):
    return [a.frame for a in actions if isinstance(a, TransmitFrame)]


class BackoffModeTestCase(unittest.TestCase):
    '''
    '''
    def test_window(self):
        mode = BackoffMode.exponential(32, 3)
        self.assertEqual([mode.window(k) for k in range(6)],
                         [32, 64, 128, 256, 256, 256])

    def test_kinds(self):
        self.assertEqual(BackoffMode.p_persistent(.2).kind, P_PERSISTENT)
        self.assertEqual(BackoffMode.exponential().kind, EXPONENTIAL)
        self.assertEqual(BackoffMode.p_persistent(.2), BackoffMode.p_persistent(.2))
        self.assertNotEqual(BackoffMode.p_persistent(.2), BackoffMode.exponential())

    def test_invalid(self):
        self.assertRaises(ValueError, BackoffMode, 'random')
        self.assertRaises(ValueError, BackoffMode.p_persistent, 1.5)
        self.assertRaises(ValueError, BackoffMode.exponential, 0)
        self.assertRaises(ValueError, ProtocolConfig, eta=0)
        self.assertRaises(ValueError, ProtocolConfig, retry_limit=-1)


class SenderTestCase(unittest.TestCase):
    '''
    '''
    def setUp(self):
        self.cfg = ProtocolConfig(retry_limit=2)
        idle = NodeState(S, self.cfg, routing={D: R})
        self.backlogged, actions = node_step(
            idle, Indication(SEND, 0, payload_bits=8000, destination=D))
        self.assertEqual(actions, [])

    def contend(self, draw=0.):
        return node_step(self.backlogged, Indication(SLOT, 0, draw=draw))

    def test_send(self):
        s = self.backlogged
        self.assertEqual(s.role_state, BACKOFF)
        self.assertTrue(s.has_packet)
        self.assertEqual(s.pending_destination, D)

    def test_slot_transmits_rrts(self):
        s, actions = self.contend(0.05)
        self.assertEqual(s.role_state, AWAIT_RCTS)
        self.assertEqual(frames_of(actions), [Frame.rrts(R, D, S, 424)])
        self.assertIn(SetTimer(RESPONSE, 286), actions)

    def test_slot_defers(self):
        s, actions = self.contend(0.5)
        self.assertEqual(s, self.backlogged)
        self.assertEqual(actions, [])

    def test_nav_blocks_slot(self):
        s = self.backlogged.copy(nav_expiry_us=1000)
        new, actions = node_step(s, Indication(SLOT, 500, draw=0.))
        self.assertEqual(new, s)
        self.assertEqual(actions, [])

    def test_rrts_addressed_during_backoff(self):
        rrts = Frame.rrts(S, D, X, 424)
        with warnings.catch_warnings():
            warnings.simplefilter('error', ProtocolViolationWarning)
            s, actions = node_step(self.backlogged, Indication(FRAME, 208, rrts))
        self.assertEqual(s, self.backlogged)
        self.assertEqual(actions, [])

    def test_rcts_from_next_hop(self):
        s, _ = self.contend()
        s, actions = node_step(s, Indication(FRAME, 446, Frame.rcts(S, R, 8456)))
        self.assertEqual(s.role_state, AWAIT_ACK)
        self.assertEqual(s.peer, R)
        tx = actions[0]
        self.assertEqual(tx.frame, Frame.data(R, D, S, 8000, 268))
        self.assertEqual((tx.start_offset_us, tx.airtime_us), (28, 8400))
        self.assertIn(SetTimer(RESPONSE, 446 + 28 + 8400 + 78), actions)

    def test_rcts_over_ris(self):
        s, _ = self.contend()
        s, actions = node_step(s, Indication(FRAME, 900, Frame.rcts(S, D, 16696)))
        self.assertEqual(s.peer, D)
        tx = actions[0]
        self.assertEqual(tx.frame.receiver_addr, D)
        self.assertEqual(tx.airtime_us, 16400)

    def test_forwarded_rrts_extends_deadline(self):
        s, _ = self.contend()
        fwd = Frame.rrts(D, D, S, 236, relayed=True)
        new, actions = node_step(s, Indication(FRAME, 444, fwd))
        self.assertEqual(new.role_state, AWAIT_RCTS)
        self.assertEqual(actions, [SetTimer(RESPONSE, 444 + 78)])
        # own address as transmitter does not set the NAV
        self.assertEqual(new.nav_expiry_us, 0)

    def test_ack_completes(self):
        s, _ = self.contend()
        s, _ = node_step(s, Indication(FRAME, 446, Frame.rcts(S, R, 8456)))
        s, actions = node_step(s, Indication(FRAME, 9000, Frame.ack(S, R)))
        self.assertEqual(s.role_state, IDLE)
        self.assertFalse(s.has_packet)
        self.assertIn(TransferComplete(8000), actions)

    def test_ack_from_stranger_fails(self):
        s, _ = self.contend()
        s, _ = node_step(s, Indication(FRAME, 446, Frame.rcts(S, R, 8456)))
        s, actions = node_step(s, Indication(FRAME, 9000, Frame.ack(S, X)))
        self.assertEqual(s.role_state, BACKOFF)
        self.assertEqual(s.retry_counter, 1)

    def test_busy_cancels_deadline(self):
        s, _ = self.contend()
        s, actions = node_step(s, Indication(BUSY, 300))
        self.assertEqual(s.role_state, AWAIT_RCTS)
        self.assertIsNone(s.response_expiry_us)
        self.assertEqual(actions, [SetTimer(RESPONSE, None)])

    def test_retry_then_abort(self):
        s = self.backlogged
        for retry in (1, 2):
            s, _ = sender_step(s, Indication(SLOT, 0, draw=0.))
            s, actions = sender_step(s, Indication(TIMER, 286, timer=RESPONSE))
            self.assertEqual(s.role_state, BACKOFF)
            self.assertEqual(s.retry_counter, retry)
            self.assertEqual(s.backoff_stage, retry)
            self.assertTrue(s.has_packet)
        s, _ = sender_step(s, Indication(SLOT, 0, draw=0.))
        s, actions = sender_step(s, Indication(TIMER, 286, timer=RESPONSE))
        self.assertEqual(s.role_state, IDLE)
        self.assertFalse(s.has_packet)
        self.assertEqual(s.retry_counter, 0)
        self.assertIn(AbortTransfer(8000), actions)

    def test_stage_capped(self):
        cfg = ProtocolConfig(backoff=BackoffMode.exponential(32, 1), retry_limit=5)
        s = self.backlogged.copy(config=cfg)
        for k in range(3):
            s, _ = sender_step(s, Indication(SLOT, 0, draw=0.))
            s, _ = sender_step(s, Indication(TIMER, 286, timer=RESPONSE))
        self.assertEqual(s.backoff_stage, 1)
        self.assertEqual(s.contention_window, 64)

    def test_exponential_counter(self):
        cfg = ProtocolConfig(backoff=BackoffMode.exponential(32, 3))
        s = self.backlogged.copy(config=cfg)
        s, actions = sender_step(s, Indication(SLOT, 0, draw=0.5))
        self.assertEqual(s.backoff_counter, 15)
        self.assertEqual(actions, [])
        for k in range(15):
            s, actions = sender_step(s, Indication(SLOT, 50*(k + 1), draw=0.9))
        self.assertEqual(s.backoff_counter, 0)
        s, actions = sender_step(s, Indication(SLOT, 900, draw=0.9))
        self.assertEqual(s.role_state, AWAIT_RCTS)

    def test_violations(self):
        s, _ = self.contend()
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter('always')
            new, actions = sender_step(s, Indication(SLOT, 100))
            again, _ = sender_step(s, Indication(SEND, 100, payload_bits=8, destination=D))
        self.assertEqual(new, s)
        self.assertEqual(again, s)
        self.assertEqual(actions, [])
        self.assertEqual(len([x for x in w
                              if issubclass(x.category, ProtocolViolationWarning)]), 2)

    def test_missing_route(self):
        s = NodeState(S, self.cfg).copy(role_state=BACKOFF, pending_payload_bits=8,
                                        pending_destination=D)
        self.assertRaises(ValueError, sender_step, s, Indication(SLOT, 0, draw=0.))


class RelayTestCase(unittest.TestCase):
    '''
    '''
    def setUp(self):
        self.cfg = ProtocolConfig()
        self.relay = NodeState(R, self.cfg, routing={D: D}, ris_available=True)
        self.rrts = Frame.rrts(R, D, S, 424)

    def test_ris_forward(self):
        s, actions = node_step(self.relay, Indication(FRAME, 208, self.rrts))
        self.assertEqual(s.role_state, RELAY_AWAIT_RCTS)
        self.assertEqual(s.link, (S, D))
        self.assertEqual(actions[0], AdjustRisPhase((S, D)))
        self.assertEqual(frames_of(actions), [Frame.rrts(D, D, S, 236, relayed=True)])
        self.assertEqual(actions[1].start_offset_us, 28)
        self.assertIn(SetTimer(RESPONSE, 208 + 28 + 208 + 78), actions)

    def test_ris_link_timer(self):
        s, _ = node_step(self.relay, Indication(FRAME, 208, self.rrts))
        s, actions = node_step(s, Indication(FRAME, 680, Frame.rcts(S, D, 16696)))
        self.assertEqual(s.role_state, RELAY_RIS_ACTIVE)
        self.assertEqual(s.ris_link_timer_expiry_us, 680 + 16696)
        self.assertIn(SetTimer(RIS_LINK, 680 + 16696), actions)

        # passive while the link is held
        data = Frame.data(D, D, S, 8000, 268)
        held, actions = node_step(s, Indication(FRAME, 17000, data))
        self.assertEqual(held.role_state, RELAY_RIS_ACTIVE)
        self.assertEqual(frames_of(actions), [])
        held, actions = node_step(held, Indication(FRAME, 17300, Frame.ack(S, D)))
        self.assertEqual(actions, [])

        s, actions = node_step(held, Indication(TIMER, 680 + 16696, timer=RIS_LINK))
        self.assertEqual(s.role_state, IDLE)
        self.assertIsNone(s.ris_link_timer_expiry_us)
        self.assertEqual(actions, [ReleaseRisLink((S, D))])

    def test_rcts_of_other_link_aborts(self):
        s, _ = node_step(self.relay, Indication(FRAME, 208, self.rrts))
        s, actions = receiver_step(s, Indication(FRAME, 680, Frame.rcts(X, D, 16696)))
        self.assertEqual(s.role_state, IDLE)
        self.assertIn(ReleaseRisLink((S, D)), actions)

    def test_timeout_releases_link(self):
        s, _ = node_step(self.relay, Indication(FRAME, 208, self.rrts))
        s, actions = node_step(s, Indication(TIMER, 522, timer=RESPONSE))
        self.assertEqual(s.role_state, IDLE)
        self.assertIsNone(s.link)
        self.assertIn(ReleaseRisLink((S, D)), actions)

    def test_store_and_forward(self):
        relay = self.relay.copy(ris_available=False)
        s, actions = node_step(relay, Indication(FRAME, 208, self.rrts))
        self.assertEqual(s.role_state, RELAY_STORE_FORWARD)
        self.assertEqual(frames_of(actions), [Frame.rcts(S, R, 8456)])

        s, actions = node_step(s, Indication(FRAME, 9000, Frame.data(R, D, S, 8000, 268)))
        self.assertEqual(frames_of(actions), [Frame.ack(S, R)])
        self.assertEqual(s.role_state, BACKOFF)
        self.assertTrue(s.priority)
        self.assertEqual((s.pending_payload_bits, s.pending_destination), (8000, D))

        # priority transmits whatever the draw
        s, actions = node_step(s, Indication(SLOT, 9300, draw=0.99))
        self.assertEqual(s.role_state, AWAIT_RCTS)
        self.assertEqual(frames_of(actions), [Frame.rrts(D, D, R, 236)])


class DestinationTestCase(unittest.TestCase):
    '''
    '''
    def setUp(self):
        self.dest = NodeState(D, ProtocolConfig())

    def test_reflected_exchange(self):
        fwd = Frame.rrts(D, D, S, 236, relayed=True)
        s, actions = node_step(self.dest, Indication(FRAME, 444, fwd))
        self.assertEqual(s.role_state, AWAIT_DATA)
        self.assertEqual(s.peer, S)
        self.assertEqual(frames_of(actions), [Frame.rcts(S, D, 16696)])

        s, actions = node_step(s, Indication(FRAME, 17000, Frame.data(D, D, S, 8000, 268)))
        self.assertEqual(s.role_state, IDLE)
        self.assertIn(DeliverPayload(8000, S), actions)
        self.assertEqual(frames_of(actions), [Frame.ack(S, D)])

    def test_direct_exchange(self):
        s, actions = node_step(self.dest, Indication(FRAME, 208, Frame.rrts(D, D, R, 236)))
        self.assertEqual(frames_of(actions), [Frame.rcts(R, D, 8456)])

    def test_timeout(self):
        s, _ = node_step(self.dest, Indication(FRAME, 208, Frame.rrts(D, D, R, 236)))
        s, actions = node_step(s, Indication(TIMER, 600, timer=RESPONSE))
        self.assertEqual(s.role_state, IDLE)
        self.assertEqual(actions, [SetTimer(RESPONSE, None)])

    def test_data_from_stranger(self):
        s, _ = node_step(self.dest, Indication(FRAME, 208, Frame.rrts(D, D, R, 236)))
        s, actions = node_step(s, Indication(FRAME, 9000, Frame.data(D, D, X, 8000, 268)))
        self.assertEqual(s.role_state, IDLE)
        self.assertEqual(frames_of(actions), [])


class NavTestCase(unittest.TestCase):
    '''
    '''
    def setUp(self):
        self.node = NodeState(X, ProtocolConfig())

    def test_rrts_durations(self):
        s, actions = node_step(self.node, Indication(FRAME, 208, Frame.rrts(R, D, S, 424)))
        self.assertEqual(s.nav_expiry_us, 208 + 424)
        self.assertEqual(actions, [])
        s, _ = node_step(self.node, Indication(FRAME, 208, Frame.rrts(R, R, S, 236)))
        self.assertEqual(s.nav_expiry_us, 208 + 236)

    def test_rcts_duration_field(self):
        s, _ = node_step(self.node, Indication(FRAME, 100, Frame.rcts(S, R, 8456)))
        self.assertEqual(s.nav_expiry_us, 100 + 8456)

    def test_data_shortens(self):
        s = self.node.copy(nav_expiry_us=632)
        s, _ = node_step(s, Indication(FRAME, 300, Frame.data(R, D, S, 8000, 268)))
        self.assertEqual(s.nav_expiry_us, 300 + 268)

    def test_data_never_extends(self):
        s = self.node.copy(nav_expiry_us=400)
        s, _ = node_step(s, Indication(FRAME, 300, Frame.data(R, D, S, 8000, 268)))
        self.assertEqual(s.nav_expiry_us, 400)

    def test_min_rule(self):
        s = NodeState(1, nav_expiry_us=9000)
        self.assertEqual(apply_nav_min_rule(s, 8456).nav_expiry_us, 8456)
        self.assertEqual(apply_nav_min_rule(s, 9500).nav_expiry_us, 9000)
        expired = NodeState(1, nav_expiry_us=100)
        self.assertEqual(apply_nav_min_rule(expired, 50, now_us=200), expired)

    def test_addressed_frames_do_not_set_nav(self):
        dest = NodeState(D, ProtocolConfig())
        s, _ = node_step(dest, Indication(FRAME, 208, Frame.rrts(D, D, R, 236)))
        self.assertEqual(s.nav_expiry_us, 0)

    def test_nav_owner(self):
        s, _ = node_step(self.node, Indication(FRAME, 208, Frame.rrts(R, D, S, 424)))
        self.assertEqual(s.nav_owner, S)
        # forwarded R-RTS keeps the original transmitter
        s, _ = node_step(s, Indication(FRAME, 444, Frame.rrts(D, D, S, 236, relayed=True)))
        self.assertEqual((s.nav_expiry_us, s.nav_owner), (444 + 236, S))
        s, _ = node_step(s, Indication(FRAME, 600, Frame.rcts(R, D, 8456)))
        self.assertIsNone(s.nav_owner)

    def test_nav_reset(self):
        s, _ = node_step(self.node, Indication(FRAME, 208, Frame.rrts(R, D, S, 424)))
        cleared = apply_nav_reset(s, S)
        self.assertEqual(cleared.nav_expiry_us, 0)
        self.assertIsNone(cleared.nav_owner)
        self.assertEqual(apply_nav_reset(s, X), s)
        self.assertEqual(apply_nav_reset(s, None), s)
        cts, _ = node_step(self.node, Indication(FRAME, 100, Frame.rcts(S, R, 8456)))
        self.assertEqual(apply_nav_reset(cts, S), cts)


class NodeStateTestCase(unittest.TestCase):
    '''
    '''
    def test_copy(self):
        s = NodeState(S, routing={D: R})
        self.assertEqual(s.copy(), s)
        self.assertNotEqual(s.copy(retry_counter=1), s)
        self.assertEqual(s.next_hop(D), R)
        self.assertIsNone(s.next_hop(X))

    def test_invalid_state(self):
        self.assertRaises(ValueError, NodeState, S, role_state='Sleeping')

    def test_exported(self):
        self.assertIs(rd.node_step, node_step)
