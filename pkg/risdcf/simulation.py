'''
.. currentmodule:: risdcf.simulation
========================================
simulation (:mod:`risdcf.simulation`)
========================================

Discrete-event simulation of a relay network running the protocol state
machines of :mod:`risdcf.protocol` over a shared medium.

The medium has zero propagation delay. A receiver hears the neighbors
of the topology plus whoever an active RIS link bridges it to. Two
transmissions overlapping at a receiver corrupt each other there, and a
node hears nothing while it transmits.

Backlogged nodes sense the channel on a slot grid: boundaries fall at
``base + DIFS + k*slot``, where `base` is the later of the end of the
last audible transmission and the NAV expiry. First-hop contenders also
wait while a downstream node holds the packet in flight, so one packet
travels the path at a time. When a reservation gets no R-CTS, the
neighbors of the node whose deadline passed drop the NAV that reservation
set, so the whole neighborhood resumes one DIFS after the last frame.

An observer on the first receiver's grid splits time into rounds: an
idle slot, a first-hop collision, or an attempt ending in success, a
later-hop collision or another failure. Round durations add up to the
elapsed time exactly. A run of idle slots with no event due is closed in
one tick and counted slot by slot.

Simulator
================
.. autosummary::
   :toctree: generated/

   Simulator
   SimMetrics
   Event

Functions
=============
.. autosummary::
    :toctree: generated/

    run_simulation
    measure_event_fractions
    relay_passivity_violations

'''
import itertools
import logging
import math
from collections import OrderedDict, namedtuple
from fractions import Fraction

import simpy
from simpy.core import Infinity

from . import constants as const
from .analytic import ContentionProbabilities, bianchi_transmission_probability
from .channel import use_ris_link
from .frame import Frame, RRTS, duration_field, advertised_duration
from .protocol import (ProtocolConfig, BackoffMode, Indication, node_step,
                       apply_nav_reset, TransmitFrame, SetTimer, AdjustRisPhase,
                       ReleaseRisLink, DeliverPayload, AbortTransfer,
                       TransferComplete, BACKOFF, AWAIT_RCTS, RELAY_AWAIT_RCTS,
                       AWAITING_STATES, RELAY_RIS_ACTIVE, EXPONENTIAL,
                       SEND, SLOT, BUSY, FRAME, CORRUPT, TIMER, COLLISION,
                       RESPONSE, RIS_LINK)
from .timing import MacTimings
from .topology import SOURCE, INTERFERER
from .util import get_fid, spawn_rng

logger = logging.getLogger(__name__)

# event kinds, in processing order at equal times
TRANSMISSION_END = 0
TIMER_EXPIRY = 1
SLOT_BOUNDARY = 2
OBSERVE = 3
TRANSMISSION_START = 4
KIND_NAMES = {TRANSMISSION_END: 'end', TIMER_EXPIRY: 'timer',
              SLOT_BOUNDARY: 'slot', OBSERVE: 'observe',
              TRANSMISSION_START: 'start'}

STALL_SLOTS = 10**6

TraceRecord = namedtuple('TraceRecord', 'time_us node kind variant addresses')


class DeadlockError(RuntimeError):
    pass


def _exact(t):
    if isinstance(t, Fraction) and t.denominator == 1:
        return t.numerator
    return t


class Event(simpy.Event):
    '''
    A scheduled simulation event.

    Events are ordered by (time_us, kind, sequence), with kinds ranked
    end < timer < slot < observe < start.

    Attributes
    ------------
    time_us : number
    sequence : int
        monotonically increasing tiebreaker
    kind : int
    subject : int or None
        node address
    frame : :class:`~risdcf.frame.Frame` or None
    data : object
        kind specific payload
    '''
    def __init__(self, env, delay, kind, sequence, subject=None, frame=None,
                 data=None):
        if delay < 0:
            raise ValueError('negative delay %s' % delay)
        super(Event, self).__init__(env)
        self.time_us = _exact(env.now + delay)
        self.sequence = sequence
        self.kind = kind
        self.subject = subject
        self.frame = frame
        self.data = data
        # a scheduled event is already triggered, like simpy.Timeout
        self._ok = True
        self._value = None
        env.schedule(self, kind, _exact(delay))

    def __repr__(self):
        return 'Event(%s @ %s #%i)' % (KIND_NAMES[self.kind], self.time_us,
                                       self.sequence)


class SimMetrics(object):
    '''
    Outcome counts and times of a simulation run.

    Attributes
    ------------
    delivered_payload_bits : int
        payload delivered at the final destination in closed rounds
    elapsed_us : number
        first to last observed slot boundary
    success_count : int
        rounds that delivered a payload
    collision_count_hop1 : int
        rounds opened by two or more first-hop reservations
    collision_count_hop2 : int
        later-hop reservations corrupted at their addressee
    idle_slots : int
    rounds : int
    hop1_success_count : int
        rounds opened by exactly one first-hop reservation
    hop2_attempt_count : int
        later-hop reservations sent
    other_failure_count : int
        rounds that fit no other class
    success_time_us, collision1_time_us, collision2_time_us, other_time_us
        time spent in each kind of non-idle round
    interferer_payload_bits : int
        payload delivered by interferers running full exchanges
    aborted_count : int
        transfers given up after the retry limit
    slot_us : number
    '''
    _fields = ('delivered_payload_bits', 'elapsed_us', 'success_count',
               'collision_count_hop1', 'collision_count_hop2', 'idle_slots',
               'rounds', 'hop1_success_count', 'hop2_attempt_count',
               'other_failure_count', 'success_time_us', 'collision1_time_us',
               'collision2_time_us', 'other_time_us',
               'interferer_payload_bits', 'aborted_count', 'slot_us')

    def __init__(self, slot_us=const.SLOT_US, **kwargs):
        for k in self._fields:
            setattr(self, k, 0)
        self.slot_us = slot_us
        for k, v in kwargs.items():
            if k not in self._fields:
                raise TypeError('unknown metric %r' % k)
            setattr(self, k, v)

    def __repr__(self):
        return 'SimMetrics(rounds=%i, successes=%i, %.6g Mbps)' % (
            self.rounds, self.success_count, self.throughput_bps/1e6)

    def __eq__(self, other):
        if not isinstance(other, SimMetrics):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __ne__(self, other):
        return (not self.__eq__(other))

    @property
    def throughput_bps(self):
        '''
        delivered payload bits per second
        '''
        if self.elapsed_us == 0:
            return 0.
        return float(Fraction(self.delivered_payload_bits)*10**6/Fraction(self.elapsed_us))

    @property
    def busy_time_us(self):
        return (self.success_time_us + self.collision1_time_us +
                self.collision2_time_us + self.other_time_us)

    def as_dict(self):
        out = OrderedDict((k, getattr(self, k)) for k in self._fields)
        out['throughput_bps'] = self.throughput_bps
        return out


class _Transmission(object):
    def __init__(self, node, frame, start, end, audience):
        self.node = node
        self.frame = frame
        self.start = start
        self.end = end
        self.audience = audience
        self.corrupted_at = set()


class _Radio(object):
    '''
    One node's view of the medium.
    '''
    def __init__(self, address, state, role, rng):
        self.address = address
        self.state = state
        self.role = role
        self.rng = rng
        self.tx = None
        self.pending_tx = 0
        self.incoming = set()
        self.last_end = 0
        self.quiet_since = 0
        self.last_slot = None
        self.slot_at = None
        self.slot_gen = 0
        self.timer_gen = {RESPONSE: 0, RIS_LINK: 0}

    @property
    def quiet(self):
        return self.tx is None and not self.incoming and self.pending_tx == 0

    @property
    def base_us(self):
        return max(self.last_end, self.state.nav_expiry_us, self.quiet_since)


class _Round(object):
    def __init__(self, start):
        self.start = start
        self.hop1_starts = 0
        self.hop2_attempts = 0
        self.hop2_collisions = 0
        self.delivered_bits = 0
        self.activity = False
        # idle slots the round stands for when nothing happens in it
        self.span = 1


class Simulator(object):
    '''
    A single simulation run.

    Parameters
    ------------
    topology : :class:`~risdcf.topology.Topology`
    timings : :class:`~risdcf.timing.MacTimings`
    backoff_mode : :class:`~risdcf.protocol.BackoffMode`
    eta : float or None
        RIS efficiency; None, or a value below `eta_threshold`, turns
        every RIS off
    seed : int
    trace : str, file or None
        where to write the tab-separated event trace
    keep_trace : bool
        also keep the trace in :attr:`trace_records`
    eta_threshold : float
        adaptive switching threshold of :func:`~risdcf.channel.use_ris_link`
    retry_limit : int
    '''
    def __init__(self, topology, timings=None, backoff_mode=None,
                 eta=const.RIS_EFFICIENCY, seed=0, trace=None,
                 keep_trace=False, eta_threshold=0.,
                 retry_limit=const.RETRY_LIMIT):
        self.topology = topology
        self.timings = MacTimings() if timings is None else timings
        self.backoff = BackoffMode.p_persistent(const.TRANSMISSION_PROBABILITY) \
            if backoff_mode is None else backoff_mode
        self.seed = seed
        self.ris_enabled = bool(topology.ris_nodes) and eta is not None and \
            use_ris_link(eta, eta_threshold)
        self.config = ProtocolConfig(self.timings, self.backoff,
                                     eta if self.ris_enabled else None,
                                     retry_limit)

        self.env = simpy.Environment()
        self._sequence = itertools.count()
        states = topology.initial_states(self.config, self.ris_enabled)
        self.radios = OrderedDict()
        for k, a in enumerate(topology.nodes):
            self.radios[a] = _Radio(a, states[a], topology.role(a), spawn_rng(seed, k))

        self._interferers = set(topology.all_interferers)
        self._aligned = not topology.interferer_traffic
        if self.backoff.kind == EXPONENTIAL:
            K = topology.contender_counts[1]
            self._interferer_p = bianchi_transmission_probability(
                self.backoff.cw_min, self.backoff.max_stage, K)
        else:
            self._interferer_p = self.backoff.p

        self._saturated = dict((a, topology.destination) for a in topology.sources)
        if topology.interferer_traffic:
            for receiver, group in topology.interferers.items():
                for a in group:
                    self._saturated[a] = receiver

        self.links = {}
        self._path_busy = False
        self._observed = topology.first_receiver
        self._downstream = set(topology.path[1:])
        self._obs_gen = 0
        self._obs_at = None
        self._last_tick = None
        self._first_tick = None
        self._round = None
        self._last_progress = 0
        self._stop = False
        self._max_slots = None
        self._duration_us = None

        self.metrics = SimMetrics(slot_us=self.timings.slot_us)
        self.trace_records = [] if keep_trace else None
        self._trace_fid = None
        self._trace_target = trace

    def __repr__(self):
        return 'Simulator(%r, %r, ris=%s, seed=%s)' % (
            self.topology, self.backoff, self.ris_enabled, self.seed)

    ## scheduling
    def _schedule(self, delay, kind, subject=None, frame=None, data=None):
        ev = Event(self.env, delay, kind, next(self._sequence), subject, frame, data)
        ev.callbacks.append(self._dispatch)
        return ev

    def _dispatch(self, ev):
        if ev.kind == TRANSMISSION_START:
            self._on_start(ev)
        elif ev.kind == TRANSMISSION_END:
            self._on_end(ev)
        elif ev.kind == TIMER_EXPIRY:
            self._on_timer(ev)
        elif ev.kind == SLOT_BOUNDARY:
            self._on_slot(ev)
        else:
            self._on_observe(ev)

    def _trace(self, node, kind, frame=None):
        if self._trace_fid is None and self.trace_records is None:
            return
        rec = TraceRecord(self.env.now, node, kind,
                          frame.variant if frame is not None else '-',
                          frame.addresses_str() if frame is not None else '-')
        if self.trace_records is not None:
            self.trace_records.append(rec)
        if self._trace_fid is not None:
            self._trace_fid.write('%s\t%x\t%s\t%s\t%s\n' % rec)

    ## slot grids
    def _next_boundary(self, base, last):
        first = base + self.timings.difs_us
        sigma = self.timings.slot_us
        now = self.env.now
        k = 0
        if now > first:
            k = int(math.ceil(Fraction(now - first)/sigma))
        if last is not None and last >= first:
            k = max(k, int(Fraction(last - first)//sigma) + 1)
        return _exact(first + k*sigma)

    def _eligible(self, radio):
        if radio.state.role_state != BACKOFF or not radio.quiet:
            return False
        if radio.role == INTERFERER and self._aligned:
            return False
        return not (radio.role == SOURCE and self._path_busy)

    def _slot_target(self, radio):
        '''
        Slot at which `radio` next acts.

        A p-persistent node without priority transmits on each boundary
        with probability p, so the boundaries it lets pass are skipped
        with one geometric draw. A pending slot still on the grid is kept.
        '''
        nb = self._next_boundary(radio.base_us, radio.last_slot)
        mode = radio.state.config.backoff
        if mode.kind == EXPONENTIAL or radio.state.priority or mode.p >= 1:
            return nb
        if mode.p <= 0:
            return None
        sigma = self.timings.slot_us
        at = radio.slot_at
        if at is not None and at >= nb and Fraction(at - nb) % sigma == 0:
            return at
        return _exact(nb + (int(radio.rng.geometric(mode.p)) - 1)*sigma)

    def _resync(self, address):
        radio = self.radios[address]
        target = None
        if self._eligible(radio):
            target = self._slot_target(radio)
        if target != radio.slot_at or target is None:
            radio.slot_gen += 1
            radio.slot_at = target
            if target is not None:
                self._schedule(target - self.env.now, SLOT_BOUNDARY, address,
                               data=radio.slot_gen)
        if address == self._observed:
            self._resync_observer()

    def _resync_observer(self):
        radio = self.radios[self._observed]
        target = None
        if radio.quiet and not self._path_busy and not self._stop:
            target = self._skip_idle_slots(
                self._next_boundary(radio.base_us, self._last_tick))
        if target != self._obs_at or target is None:
            self._obs_gen += 1
            self._obs_at = target
            if target is not None:
                self._schedule(target - self.env.now, OBSERVE, data=self._obs_gen)

    def _skip_idle_slots(self, target):
        '''
        Stretches a quiet round over the following slots in which no event
        is due, so one tick closes them all as idle slots.

        The stretch stops at the next queued event and within the slot,
        duration and stall budgets of the run.
        '''
        rnd = self._round
        if rnd is None or rnd.activity or rnd.hop1_starts:
            return target
        sigma = self.timings.slot_us
        steps = Fraction(target - rnd.start)/sigma
        if steps.denominator != 1 or steps < 1:
            rnd.span = 1
            return target
        limit = STALL_SLOTS
        if self._max_slots is not None:
            limit = min(limit, self._max_slots - self.metrics.rounds)
        if self._duration_us is not None:
            limit = min(limit, int(Fraction(self._duration_us - rnd.start)//sigma))
        nxt = self.env.peek()
        if nxt != Infinity:
            limit = min(limit, int(Fraction(nxt - rnd.start)//sigma))
        rnd.span = max(int(steps), limit)
        return _exact(rnd.start + rnd.span*sigma)

    ## node stepping
    def _step(self, address, indication):
        radio = self.radios[address]
        if radio.role == INTERFERER and self._aligned:
            return
        old = radio.state
        state, actions = node_step(old, indication)
        radio.state = state
        if state.role_state == RELAY_RIS_ACTIVE and old.role_state != RELAY_RIS_ACTIVE:
            self._trace(address, 'ris-active')
        regenerate = False
        for a in actions:
            if isinstance(a, TransmitFrame):
                radio.pending_tx += 1
                self._schedule(a.start_offset_us, TRANSMISSION_START, address,
                               a.frame, a.airtime_us)
            elif isinstance(a, SetTimer):
                radio.timer_gen[a.kind] += 1
                if a.expiry_us is not None:
                    self._schedule(a.expiry_us - self.env.now, TIMER_EXPIRY,
                                   address, data=(a.kind, radio.timer_gen[a.kind]))
            elif isinstance(a, AdjustRisPhase):
                self.links[address] = a.link
                self._trace(address, 'ris-adjust')
            elif isinstance(a, ReleaseRisLink):
                self.links.pop(address, None)
                self._trace(address, 'ris-release')
            elif isinstance(a, DeliverPayload):
                if a.transmitter in self._interferers:
                    self.metrics.interferer_payload_bits += a.bits
                elif self._round is not None:
                    self._round.delivered_bits += a.bits
            elif isinstance(a, AbortTransfer):
                self.metrics.aborted_count += 1
                regenerate = address in self._saturated
            elif isinstance(a, TransferComplete):
                regenerate = address in self._saturated

        if indication.kind == TIMER and indication.timer == RESPONSE and \
                old.role_state in (AWAIT_RCTS, RELAY_AWAIT_RCTS):
            # the reservation failed; a relay reports it for the original sender
            owner = old.link[0] if old.role_state == RELAY_AWAIT_RCTS else address
            self._reset_navs(address, owner)
        if address in self._downstream:
            self._update_gate()
        if regenerate:
            self._step(address, Indication(
                SEND, self.env.now, payload_bits=self.timings.payload_bits,
                destination=self._saturated[address]))
        self._resync(address)

    def _reset_navs(self, address, owner):
        '''
        Clears the NAV that a failed R-RTS of `owner` set around `address`.
        '''
        for r in sorted(self.topology.neighbors(address)):
            radio = self.radios[r]
            state = apply_nav_reset(radio.state, owner)
            if state is not radio.state:
                radio.state = state
                self._resync(r)

    def _update_gate(self):
        busy = any(self.radios[a].state.has_packet for a in self.topology.relays)
        if busy == self._path_busy:
            return
        self._path_busy = busy
        now = self.env.now
        for a in self.topology.sources:
            if not busy:
                radio = self.radios[a]
                radio.quiet_since = max(radio.quiet_since, now)
            self._resync(a)
        if not busy:
            radio = self.radios[self._observed]
            radio.quiet_since = max(radio.quiet_since, now)
        self._resync_observer()

    ## medium
    def _audience(self, node):
        heard = set(self.topology.neighbors(node))
        for a, b in self.links.values():
            if node == a:
                heard.add(b)
            elif node == b:
                heard.add(a)
        heard.discard(node)
        return tuple(sorted(heard))

    def _on_start(self, ev):
        node = ev.subject
        self.radios[node].pending_tx -= 1
        self._start_transmission(node, ev.frame, ev.data)

    def _start_transmission(self, node, frame, airtime):
        now = self.env.now
        radio = self.radios[node]
        audience = self._audience(node)
        tx = _Transmission(node, frame, now, _exact(now + airtime), audience)

        for other in radio.incoming:
            other.corrupted_at.add(node)
        radio.tx = tx
        for r in audience:
            rr = self.radios[r]
            if rr.tx is not None:
                tx.corrupted_at.add(r)
            if rr.incoming:
                tx.corrupted_at.add(r)
                for other in rr.incoming:
                    other.corrupted_at.add(r)
            rr.incoming.add(tx)
        self._schedule(airtime, TRANSMISSION_END, node, frame, tx)
        self._trace(node, 'start', frame)
        self._observe_start(tx)

        if self._aligned and frame.variant == RRTS and node not in self._interferers:
            self._align_interferers(frame.receiver_addr)

        for r in audience:
            if self.radios[r].state.role_state in AWAITING_STATES:
                self._step(r, Indication(BUSY, now))
            else:
                self._resync(r)
        self._resync(node)

    def _align_interferers(self, receiver):
        group = self.topology.interferers.get(receiver, ())
        if not group:
            return
        dur = duration_field(advertised_duration(RRTS, self.timings))
        for a in group:
            if self.radios[a].rng.random() < self._interferer_p:
                self._start_transmission(a, Frame.rrts(receiver, receiver, a, dur),
                                         self.timings.rrts_us)

    def _on_end(self, ev):
        tx = ev.data
        node = tx.node
        now = self.env.now
        radio = self.radios[node]
        radio.tx = None
        radio.last_end = max(radio.last_end, now)
        for r in tx.audience:
            rr = self.radios[r]
            rr.incoming.discard(tx)
            rr.last_end = max(rr.last_end, now)
        self._trace(node, 'end', tx.frame)

        addressee = tx.frame.receiver_addr
        collided = addressee in tx.corrupted_at or addressee not in tx.audience
        self._observe_end(tx, collided)
        if collided:
            self._step(node, Indication(COLLISION, now, frame=tx.frame))
        for r in tx.audience:
            if r in tx.corrupted_at:
                self._step(r, Indication(CORRUPT, now))
            else:
                self._step(r, Indication(FRAME, now, frame=tx.frame))
        self._resync(node)

    def _on_timer(self, ev):
        kind, gen = ev.data
        radio = self.radios[ev.subject]
        if radio.timer_gen[kind] != gen:
            return
        self._trace(ev.subject, 'timer')
        self._step(ev.subject, Indication(TIMER, self.env.now, timer=kind))

    def _on_slot(self, ev):
        radio = self.radios[ev.subject]
        if radio.slot_gen != ev.data:
            return
        radio.slot_at = None
        radio.last_slot = self.env.now
        self._trace(ev.subject, 'slot')
        # a p-persistent slot was drawn to transmit in _slot_target
        draw = radio.rng.random() if self.backoff.kind == EXPONENTIAL else 0.
        self._step(ev.subject, Indication(SLOT, self.env.now, draw=draw))

    ## observer
    def _observe_start(self, tx):
        rnd = self._round
        if rnd is None:
            return
        fr = self._observed
        if tx.node == fr or fr in tx.audience:
            rnd.activity = True
        if tx.frame.receiver_addr == fr and tx.node in self._saturated and \
                tx.node not in self._interferers and tx.start == rnd.start:
            rnd.hop1_starts += 1
        if tx.frame.variant == RRTS and tx.node in self._downstream and \
                tx.frame.receiver_addr in self._downstream:
            rnd.hop2_attempts += 1

    def _observe_end(self, tx, collided):
        rnd = self._round
        if rnd is None or not collided:
            return
        if tx.frame.variant == RRTS and tx.node in self._downstream and \
                tx.frame.receiver_addr in self._downstream:
            rnd.hop2_collisions += 1

    def _close_round(self, now):
        rnd = self._round
        m = self.metrics
        d = _exact(now - rnd.start)
        m.rounds += 1
        m.hop2_attempt_count += rnd.hop2_attempts
        m.collision_count_hop2 += rnd.hop2_collisions
        if rnd.hop1_starts == 1:
            m.hop1_success_count += 1
        if rnd.delivered_bits:
            m.success_count += 1
            m.success_time_us += d
            m.delivered_payload_bits += rnd.delivered_bits
        elif rnd.hop1_starts >= 2:
            m.collision_count_hop1 += 1
            m.collision1_time_us += d
        elif rnd.hop2_collisions:
            m.collision2_time_us += d
        elif not rnd.activity and d == rnd.span*self.timings.slot_us:
            m.idle_slots += rnd.span
            m.rounds += rnd.span - 1
        else:
            m.other_failure_count += 1
            m.other_time_us += d
        m.elapsed_us = _exact(now - self._first_tick)

    def _on_observe(self, ev):
        if ev.data != self._obs_gen:
            return
        now = self.env.now
        self._obs_at = None
        if self._first_tick is None:
            self._first_tick = now
        if self._round is not None:
            self._close_round(now)
        self._last_tick = now
        self._last_progress = now
        if self._max_slots is not None and self.metrics.rounds >= self._max_slots:
            self._stop = True
            self._round = None
            return
        self._trace(self._observed, 'round')
        self._round = _Round(now)
        self._resync_observer()

    ## running
    def run(self, max_slots=None, duration_us=None):
        '''
        Runs until `max_slots` rounds are observed or `duration_us` passes.

        Returns
        --------
        metrics : :class:`SimMetrics`

        Raises
        --------
        DeadlockError
            the event queue empties, or no round closes for 10**6 slots
        '''
        if max_slots is None and duration_us is None:
            raise ValueError('a slot or duration budget is required')
        if max_slots is not None and max_slots < 1:
            raise ValueError('max_slots must be >= 1, got %s' % max_slots)
        if duration_us is not None and not duration_us > 0:
            raise ValueError('duration_us must be positive, got %s' % duration_us)
        self._max_slots = max_slots
        self._duration_us = duration_us
        stall_us = STALL_SLOTS*self.timings.slot_us

        logger.info('simulation start: %r, budget slots=%s duration=%s',
                    self, max_slots, duration_us)
        if self._trace_target is not None:
            self._trace_fid = get_fid(self._trace_target, 'w')
        try:
            for a, dest in sorted(self._saturated.items()):
                self._step(a, Indication(SEND, self.env.now,
                                         payload_bits=self.timings.payload_bits,
                                         destination=dest))
            for a in self.radios:
                self._resync(a)

            env = self.env
            while not self._stop:
                nxt = env.peek()
                if nxt == Infinity:
                    raise DeadlockError('event queue empty at %s us' % env.now)
                if duration_us is not None and nxt > duration_us:
                    logger.info('duration budget of %s us exhausted', duration_us)
                    break
                if nxt - self._last_progress > stall_us:
                    raise DeadlockError('no round closed between %s us and %s us'
                                        % (self._last_progress, nxt))
                env.step()
        finally:
            if self._trace_fid is not None and self._trace_fid is not self._trace_target:
                self._trace_fid.close()
            self._trace_fid = None

        logger.info('simulation done: %r after %s us', self.metrics, self.env.now)
        return self.metrics


def run_simulation(topology, timings=None, backoff_mode=None,
                   eta=const.RIS_EFFICIENCY, max_slots=None, duration_us=None,
                   seed=0, trace=None, eta_threshold=0.,
                   retry_limit=const.RETRY_LIMIT):
    '''
    Simulates a topology under saturation and measures its throughput.

    Parameters
    -----------
    topology : :class:`~risdcf.topology.Topology`
    timings : :class:`~risdcf.timing.MacTimings`
    backoff_mode : :class:`~risdcf.protocol.BackoffMode`
    eta : float or None
        RIS efficiency
    max_slots : int
        number of contention rounds to observe
    duration_us : number
        simulated time budget
    seed : int
    trace : str or file
        optional tab-separated event trace
    eta_threshold : float
    retry_limit : int

    Returns
    --------
    metrics : :class:`SimMetrics`

    Examples
    ----------
    >>> top = Topology.dual_hop(1, 1)
    >>> m = run_simulation(top, backoff_mode=BackoffMode.p_persistent(1.), eta=None, max_slots=10)
    >>> m.throughput_bps
    433839.47...
    '''
    sim = Simulator(topology, timings, backoff_mode, eta, seed, trace,
                    eta_threshold=eta_threshold, retry_limit=retry_limit)
    return sim.run(max_slots=max_slots, duration_us=duration_us)


def measure_event_fractions(metrics):
    '''
    Empirical round outcome probabilities of a run.

    P_I, P_S1 and P_C1 are fractions of observed rounds. P_S2 and P_C2
    are fractions of later-hop reservations; they are nan when none was
    sent.

    Returns
    --------
    probs : :class:`~risdcf.analytic.ContentionProbabilities`
    '''
    n = metrics.rounds
    if n == 0:
        raise ValueError('no rounds were observed')
    p_i = metrics.idle_slots/float(n)
    p_s1 = metrics.hop1_success_count/float(n)
    p_c1 = metrics.collision_count_hop1/float(n)
    if metrics.hop2_attempt_count:
        p_c2 = metrics.collision_count_hop2/float(metrics.hop2_attempt_count)
        p_s2 = 1 - p_c2
    else:
        p_s2 = p_c2 = float('nan')
    return ContentionProbabilities(p_i, p_s1, p_c1, p_s2, p_c2)


def relay_passivity_violations(trace_events):
    '''
    Transmissions started by a relay while its RIS carries a transfer.

    A relay is passive from the moment it arms its RIS link timer until
    it releases the link.

    Parameters
    -----------
    trace_events : iterable of :class:`TraceRecord`

    Returns
    --------
    violations : list of :class:`TraceRecord`
    '''
    active = set()
    out = []
    for rec in trace_events:
        if rec.kind == 'ris-active':
            active.add(rec.node)
        elif rec.kind == 'ris-release':
            active.discard(rec.node)
        elif rec.kind == 'start' and rec.node in active:
            out.append(rec)
    return out
