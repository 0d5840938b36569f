'''
.. currentmodule:: risdcf.protocol
========================================
protocol (:mod:`risdcf.protocol`)
========================================

Sending and receiving node state machines.

Every node is driven by :func:`node_step`, a pure function from
(state, indication) to (new state, actions). The sending side contends
for the channel, reserves a path with an R-RTS and sends DATA to whoever
answers with an R-CTS. The receiving side answers, reflects or stores
and forwards, depending on where the frame is headed and whether its RIS
is usable.

Random decisions use the `draw` carried by a slot indication, so equal
inputs always give equal outputs.

Configuration
================
.. autosummary::
   :toctree: generated/

   BackoffMode
   ProtocolConfig
   NodeState
   Indication

Step Functions
=================
.. autosummary::
    :toctree: generated/

    node_step
    sender_step
    receiver_step
    apply_nav_min_rule
    apply_nav_reset

'''
from collections import namedtuple
from warnings import warn

from . import constants as const
from .frame import (Frame, RRTS, RCTS, DATA, ACK, duration_field,
                    advertised_duration, nav_duration)
from .timing import MacTimings

# role states
IDLE = 'Idle'
BACKOFF = 'Backoff'
AWAIT_RCTS = 'AwaitRCts'
AWAIT_DATA = 'AwaitData'
AWAIT_ACK = 'AwaitAck'
RELAY_AWAIT_RCTS = 'RelayAwaitRCts'
RELAY_RIS_ACTIVE = 'RelayRisActive'
RELAY_STORE_FORWARD = 'RelayStoreForward'
STATES = (IDLE, BACKOFF, AWAIT_RCTS, AWAIT_DATA, AWAIT_ACK, RELAY_AWAIT_RCTS,
          RELAY_RIS_ACTIVE, RELAY_STORE_FORWARD)
SENDER_STATES = (BACKOFF, AWAIT_RCTS, AWAIT_ACK)
AWAITING_STATES = (AWAIT_RCTS, AWAIT_DATA, AWAIT_ACK, RELAY_AWAIT_RCTS,
                   RELAY_STORE_FORWARD)

# indication kinds
SEND = 'send'
SLOT = 'slot'
BUSY = 'busy'
FRAME = 'frame'
CORRUPT = 'corrupt'
TIMER = 'timer'
COLLISION = 'collision'
INDICATIONS = (SEND, SLOT, BUSY, FRAME, CORRUPT, TIMER, COLLISION)

# timer kinds
RESPONSE = 'response'
RIS_LINK = 'ris_link'

P_PERSISTENT = 'p-persistent'
EXPONENTIAL = 'exponential'

## actions
TransmitFrame = namedtuple('TransmitFrame', 'frame start_offset_us airtime_us')
SetTimer = namedtuple('SetTimer', 'kind expiry_us')
AdjustRisPhase = namedtuple('AdjustRisPhase', 'link')
ReleaseRisLink = namedtuple('ReleaseRisLink', 'link')
DeliverPayload = namedtuple('DeliverPayload', 'bits transmitter')
AbortTransfer = namedtuple('AbortTransfer', 'bits')
TransferComplete = namedtuple('TransferComplete', 'bits')


class ProtocolViolationWarning(UserWarning):
    pass


class BackoffMode(object):
    '''
    How a backlogged node decides to transmit in an idle slot.

    Use :func:`p_persistent` or :func:`exponential`.

    Parameters
    ------------
    kind : ['p-persistent', 'exponential']
    p : float
        per-slot transmission probability (p-persistent)
    cw_min : int
        initial contention window W (exponential)
    max_stage : int
        maximum backoff stage n (exponential)
    '''
    def __init__(self, kind, p=const.TRANSMISSION_PROBABILITY,
                 cw_min=const.CW_MIN, max_stage=const.MAX_BACKOFF_STAGE):
        if kind not in (P_PERSISTENT, EXPONENTIAL):
            raise ValueError('unknown backoff kind %r' % kind)
        if not 0 <= p <= 1:
            raise ValueError('p must be in [0, 1], got %s' % p)
        if cw_min < 1:
            raise ValueError('cw_min must be >= 1, got %s' % cw_min)
        if max_stage < 0:
            raise ValueError('max_stage must be >= 0, got %s' % max_stage)
        self.kind = kind
        self.p = float(p)
        self.cw_min = int(cw_min)
        self.max_stage = int(max_stage)

    @classmethod
    def p_persistent(cls, p):
        return cls(P_PERSISTENT, p=p)

    @classmethod
    def exponential(cls, cw_min=const.CW_MIN, max_stage=const.MAX_BACKOFF_STAGE):
        return cls(EXPONENTIAL, cw_min=cw_min, max_stage=max_stage)

    def __repr__(self):
        if self.kind == P_PERSISTENT:
            return 'BackoffMode(p-persistent, p=%s)' % self.p
        return 'BackoffMode(exponential, W=%i, n=%i)' % (self.cw_min, self.max_stage)

    def __eq__(self, other):
        if not isinstance(other, BackoffMode):
            return NotImplemented
        return (self.kind, self.p, self.cw_min, self.max_stage) == \
            (other.kind, other.p, other.cw_min, other.max_stage)

    def __ne__(self, other):
        return (not self.__eq__(other))

    def window(self, stage):
        '''
        contention window at backoff `stage`, min(2**stage*W, 2**n*W)
        '''
        return min(2**stage*self.cw_min, 2**self.max_stage*self.cw_min)


class ProtocolConfig(object):
    '''
    Parameters shared by every node of a network.

    Parameters
    ------------
    timings : :class:`~risdcf.timing.MacTimings`
    backoff : :class:`BackoffMode`
    eta : float or None
        RIS efficiency used for DATA over a reflected link. None sends
        reflected DATA at the conventional rate.
    retry_limit : int
    '''
    def __init__(self, timings=None, backoff=None, eta=const.RIS_EFFICIENCY,
                 retry_limit=const.RETRY_LIMIT):
        self.timings = MacTimings() if timings is None else timings
        self.backoff = BackoffMode.p_persistent(const.TRANSMISSION_PROBABILITY) \
            if backoff is None else backoff
        if eta is not None and not eta > 0:
            raise ValueError('eta must be positive or None, got %s' % eta)
        if retry_limit < 0:
            raise ValueError('retry_limit must be >= 0, got %s' % retry_limit)
        self.eta = eta
        self.retry_limit = int(retry_limit)

    def __repr__(self):
        return 'ProtocolConfig(%r, eta=%s, retry_limit=%i)' % (
            self.backoff, self.eta, self.retry_limit)

    @property
    def response_window_us(self):
        '''
        SIFS + slot, the time a reply has to start after a frame ends
        '''
        return self.timings.sifs_us + self.timings.slot_us

    def ris_data_airtime_us(self):
        return self.timings.data_airtime_us(self.eta)

    def rcts_duration_us(self, ris_path):
        eta = self.eta if ris_path else None
        return duration_field(advertised_duration(RCTS, self.timings, eta=eta))


class Indication(object):
    '''
    Input to a step function.

    Parameters
    ------------
    kind : ['send', 'slot', 'busy', 'frame', 'corrupt', 'timer', 'collision']
    now_us : number
        simulation time
    frame : :class:`~risdcf.frame.Frame`
        received frame, for 'frame'
    draw : float
        uniform number in [0, 1), for 'slot'
    timer : ['response', 'ris_link']
        expired timer, for 'timer'
    payload_bits, destination : int
        new packet, for 'send'
    '''
    def __init__(self, kind, now_us=0, frame=None, draw=0., timer=None,
                 payload_bits=None, destination=None):
        self.kind = kind
        self.now_us = now_us
        self.frame = frame
        self.draw = draw
        self.timer = timer
        self.payload_bits = payload_bits
        self.destination = destination

    def __repr__(self):
        extra = ''
        if self.frame is not None:
            extra = ', %r' % self.frame
        elif self.timer is not None:
            extra = ', %s' % self.timer
        return 'Indication(%s @ %s%s)' % (self.kind, self.now_us, extra)


class NodeState(object):
    '''
    State of one node.

    Instances are treated as immutable; step functions return a
    :func:`copy` with their changes.

    Attributes
    ------------
    node_id : int
        48-bit address
    role_state : str
        one of :data:`STATES`
    nav_expiry_us : number
        virtual carrier sense busy until this time
    nav_owner : int or None
        transmitter of the R-RTS that set the NAV, None when another
        frame set it
    backoff_counter : int or None
        slots remaining, None until drawn
    backoff_stage : int
    retry_counter : int
    ris_link_timer_expiry_us : number or None
        set exactly while in RelayRisActive
    ris_available : bool
    routing : dict
        destination -> next hop
    pending_payload_bits : int or None
        the buffered packet, None when empty
    pending_destination : int or None
    priority : bool
        forwarding priority of a relayed packet
    peer : int or None
        the other end of the current exchange
    link : tuple or None
        (a, b), the reflected link of a relay
    response_expiry_us : number or None
    config : :class:`ProtocolConfig`
    '''
    _fields = ('node_id', 'role_state', 'nav_expiry_us', 'nav_owner',
               'backoff_counter', 'backoff_stage', 'retry_counter',
               'ris_link_timer_expiry_us',               'ris_available', 'routing', 'pending_payload_bits',
               'pending_destination', 'priority', 'peer', 'link',
               'response_expiry_us', 'config')

    def __init__(self, node_id, config=None, routing=None, ris_available=False,
                 role_state=IDLE, nav_expiry_us=0, backoff_counter=None,
                 backoff_stage=0, retry_counter=0,
                 ris_link_timer_expiry_us=None, pending_payload_bits=None,
                 pending_destination=None, priority=False, peer=None,
                 link=None, response_expiry_us=None, nav_owner=None):
        if role_state not in STATES:
            raise ValueError('unknown role state %r' % role_state)
        self.node_id = node_id
        self.config = ProtocolConfig() if config is None else config
        self.routing = {} if routing is None else routing
        self.ris_available = bool(ris_available)
        self.role_state = role_state
        self.nav_expiry_us = nav_expiry_us
        self.nav_owner = nav_owner
        self.backoff_counter = backoff_counter
        self.backoff_stage = backoff_stage
        self.retry_counter = retry_counter
        self.ris_link_timer_expiry_us = ris_link_timer_expiry_us
        self.pending_payload_bits = pending_payload_bits
        self.pending_destination = pending_destination
        self.priority = priority
        self.peer = peer
        self.link = link
        self.response_expiry_us = response_expiry_us

    def copy(self, **changes):
        kw = dict((k, getattr(self, k)) for k in self._fields)
        kw.update(changes)
        return NodeState(**kw)

    def __eq__(self, other):
        if not isinstance(other, NodeState):
            return NotImplemented
        return all(getattr(self, k) == getattr(other, k) for k in self._fields)

    def __ne__(self, other):
        return (not self.__eq__(other))

    def __repr__(self):
        return 'NodeState(%x, %s, nav=%s, stage=%i, retry=%i)' % (
            self.node_id, self.role_state, self.nav_expiry_us,
            self.backoff_stage, self.retry_counter)

    @property
    def has_packet(self):
        return self.pending_payload_bits is not None

    @property
    def contention_window(self):
        return self.config.backoff.window(self.backoff_stage)

    def next_hop(self, destination):
        return self.routing.get(destination)


def _violation(state, event, msg):
    warn('node %x in %s: %s (%r)' % (state.node_id, state.role_state, msg, event),
         ProtocolViolationWarning)
    return state, []


def apply_nav_min_rule(state, data_frame_duration, now_us=0):
    '''
    Shortens an active NAV to the duration advertised by an overheard DATA.

    NAV = min(DATA duration, NAV remainder). The NAV is never extended,
    and an expired NAV is left alone.

    Parameters
    -----------
    state : :class:`NodeState`
    data_frame_duration : number
        duration field of the DATA, from its end
    now_us : number
        end time of the DATA

    Examples
    ----------
    >>> s = NodeState(1, nav_expiry_us=9000)
    >>> apply_nav_min_rule(s, 8456).nav_expiry_us
    8456
    '''
    remainder = state.nav_expiry_us - now_us
    if remainder <= 0 or data_frame_duration >= remainder:
        return state
    return state.copy(nav_expiry_us=now_us + data_frame_duration)


def apply_nav_reset(state, owner):
    '''
    Clears a NAV set by an R-RTS of `owner` whose reservation failed.

    A NAV set by another transmitter, or by any other frame, is left
    alone.

    The simulator applies it to every neighbor of a node whose response
    deadline passes in AwaitRCts or RelayAwaitRCts, so the neighbors
    contend again one DIFS after the last frame.

    Parameters
    -----------
    state : :class:`NodeState`
    owner : int
        transmitter address of the failed R-RTS

    Examples
    ----------
    >>> s = NodeState(1, nav_expiry_us=9000, nav_owner=7)
    >>> apply_nav_reset(s, 7).nav_expiry_us
    0
    >>> apply_nav_reset(s, 8).nav_expiry_us
    9000
    '''
    if owner is None or state.nav_owner != owner:
        return state
    return state.copy(nav_expiry_us=0, nav_owner=None)


def _overhear(state, f, now):
    d = nav_duration(f, state.config.timings)
    if f.variant == DATA and state.nav_expiry_us > now:
        out = apply_nav_min_rule(state, d, now)
        return out if out is state else out.copy(nav_owner=None)
    if now + d > state.nav_expiry_us:
        owner = f.transmitter_addr if f.variant == RRTS else None
        return state.copy(nav_expiry_us=now + d, nav_owner=owner)
    return state


## sending node
def _transmit_rrts(s, now):
    t = s.config.timings
    dest = s.pending_destination
    next_hop = s.next_hop(dest)
    if next_hop is None:
        raise ValueError('node %x has no route to %x' % (s.node_id, dest))
    dur = duration_field(advertised_duration(RRTS, t, same_address=next_hop == dest))
    rrts = Frame.rrts(next_hop, dest, s.node_id, dur)
    expiry = now + t.rrts_us + s.config.response_window_us
    new = s.copy(role_state=AWAIT_RCTS, backoff_counter=None, peer=next_hop,
                 response_expiry_us=expiry)
    return new, [TransmitFrame(rrts, 0, t.rrts_us), SetTimer(RESPONSE, expiry)]


def _backoff_slot(s, event):
    if event.now_us < s.nav_expiry_us:
        return s, []
    mode = s.config.backoff
    if mode.kind == P_PERSISTENT:
        if s.priority or event.draw < mode.p:
            return _transmit_rrts(s, event.now_us)
        return s, []

    counter = s.backoff_counter
    if counter is None:
        if s.priority and s.retry_counter == 0:
            counter = 0
        else:
            counter = int(event.draw*s.contention_window)
    if counter == 0:
        return _transmit_rrts(s, event.now_us)
    return s.copy(backoff_counter=counter - 1), []


def _sender_failure(s):
    actions = [SetTimer(RESPONSE, None)]
    if s.retry_counter >= s.config.retry_limit:
        actions.append(AbortTransfer(s.pending_payload_bits))
        return s.copy(role_state=IDLE, pending_payload_bits=None,
                      pending_destination=None, retry_counter=0,
                      backoff_stage=0, backoff_counter=None, priority=False,
                      peer=None, response_expiry_us=None), actions
    stage = min(s.backoff_stage + 1, s.config.backoff.max_stage)
    return s.copy(role_state=BACKOFF, retry_counter=s.retry_counter + 1,
                  backoff_stage=stage, backoff_counter=None, peer=None,
                  response_expiry_us=None), actions


def _cancel_response(s):
    return s.copy(response_expiry_us=None), [SetTimer(RESPONSE, None)]


def _send_data(s, rcts, now):
    cfg = s.config
    t = cfg.timings
    next_hop = s.next_hop(s.pending_destination)
    if rcts.sender_addr == next_hop:
        target, airtime = next_hop, t.data_airtime_us()
    else:
        # the answer came through a reflecting relay
        target, airtime = rcts.sender_addr, cfg.ris_data_airtime_us()
    dur = duration_field(advertised_duration(DATA, t))
    data = Frame.data(target, s.pending_destination, s.node_id,
                      s.pending_payload_bits, dur)
    expiry = now + t.sifs_us + airtime + cfg.response_window_us
    new = s.copy(role_state=AWAIT_ACK, peer=target, response_expiry_us=expiry)
    return new, [TransmitFrame(data, t.sifs_us, airtime), SetTimer(RESPONSE, expiry)]


def sender_step(state, event):
    '''
    Steps the sending side of a node.

    ===========  =========================  =================================
    state        indication                 result
    ===========  =========================  =================================
    Idle         send                       Backoff with the new packet
    Backoff      slot                       R-RTS to the next hop, or wait
    AwaitRCts    R-CTS from the next hop    DATA to the next hop
    AwaitRCts    R-CTS from elsewhere       DATA to the R-CTS sender over RIS
    AwaitRCts    own R-RTS forwarded        restart the response deadline
    AwaitAck     ACK from the peer          TransferComplete, Idle
    any await    busy                       cancel the response deadline
    any await    failure                    retry with a larger window, or
                                            AbortTransfer past the limit
    ===========  =========================  =================================

    A failure is a timeout, a corrupt reception, a collision report or
    any other frame. Malformed indications raise a
    :class:`ProtocolViolationWarning` and leave the state unchanged.

    A node in Backoff already holds a packet and answers no frame, an
    R-RTS addressed to it included. It accepts no new reservation until
    its own transfer ends, and the other sender times out and retries.

    Parameters
    -----------
    state : :class:`NodeState`
    event : :class:`Indication`

    Returns
    --------
    state : :class:`NodeState`
    actions : list
    '''
    s = state
    kind = event.kind
    now = event.now_us

    if kind == SEND:
        if s.role_state != IDLE or s.has_packet:
            return _violation(s, event, 'send request while busy')
        if event.payload_bits is None or event.destination is None:
            return _violation(s, event, 'send request without a packet')
        new = s.copy(role_state=BACKOFF, pending_payload_bits=event.payload_bits,
                     pending_destination=event.destination, backoff_stage=0,
                     retry_counter=0, backoff_counter=None, priority=False)
        return new, []

    if s.role_state == IDLE:
        return s, []

    if s.role_state == BACKOFF:
        if kind == SLOT:
            return _backoff_slot(s, event)
        if kind == TIMER:
            return _violation(s, event, 'unexpected timer')
        return s, []

    if kind == SLOT:
        return _violation(s, event, 'slot while awaiting a reply')
    if kind == BUSY:
        return _cancel_response(s)

    if s.role_state == AWAIT_RCTS:
        if kind == FRAME:
            f = event.frame
            if f.variant == RRTS and f.relayed and \
                    f.transmitter_addr == s.node_id and \
                    f.receiver_addr != s.node_id:
                expiry = now + s.config.response_window_us
                return s.copy(response_expiry_us=expiry), [SetTimer(RESPONSE, expiry)]
            if f.variant == RCTS and f.receiver_addr == s.node_id:
                return _send_data(s, f, now)
        return _sender_failure(s)

    if s.role_state == AWAIT_ACK:
        if kind == FRAME:
            f = event.frame
            if f.variant == ACK and f.receiver_addr == s.node_id and \
                    f.transmitter_addr == s.peer:
                new = s.copy(role_state=IDLE, pending_payload_bits=None,
                             pending_destination=None, retry_counter=0,
                             backoff_stage=0, backoff_counter=None,
                             priority=False, peer=None, response_expiry_us=None)
                return new, [SetTimer(RESPONSE, None),
                             TransferComplete(s.pending_payload_bits)]
        return _sender_failure(s)

    return _violation(s, event, 'not a sending state')


## receiving node
def _receiver_abort(s):
    actions = [SetTimer(RESPONSE, None)]
    if s.link is not None:
        actions.append(ReleaseRisLink(s.link))
    new = s.copy(role_state=IDLE, peer=None, link=None,
                 ris_link_timer_expiry_us=None, response_expiry_us=None)
    return new, actions


def _accept_rrts(s, f, now):
    cfg = s.config
    t = cfg.timings
    dest = f.destination_addr
    window = cfg.response_window_us

    if dest == s.node_id or f.relayed:
        rcts = Frame.rcts(f.transmitter_addr, s.node_id, cfg.rcts_duration_us(f.relayed))
        expiry = now + t.sifs_us + t.rcts_us + window
        new = s.copy(role_state=AWAIT_DATA, peer=f.transmitter_addr,
                     response_expiry_us=expiry)
        return new, [TransmitFrame(rcts, t.sifs_us, t.rcts_us),
                     SetTimer(RESPONSE, expiry)]

    next_hop = s.next_hop(dest)
    if next_hop is None:
        return _violation(s, Indication(FRAME, now, f), 'no route to %x' % dest)

    if s.ris_available:
        dur = duration_field(advertised_duration(RRTS, t, same_address=next_hop == dest))
        fwd = Frame.rrts(next_hop, dest, f.transmitter_addr, dur, relayed=True)
        link = (f.transmitter_addr, next_hop)
        expiry = now + t.sifs_us + t.rrts_us + window
        new = s.copy(role_state=RELAY_AWAIT_RCTS, peer=next_hop, link=link,
                     response_expiry_us=expiry)
        return new, [AdjustRisPhase(link), TransmitFrame(fwd, t.sifs_us, t.rrts_us),
                     SetTimer(RESPONSE, expiry)]

    rcts = Frame.rcts(f.transmitter_addr, s.node_id, cfg.rcts_duration_us(False))
    expiry = now + t.sifs_us + t.rcts_us + window
    new = s.copy(role_state=RELAY_STORE_FORWARD, peer=f.transmitter_addr,
                 response_expiry_us=expiry)
    return new, [TransmitFrame(rcts, t.sifs_us, t.rcts_us), SetTimer(RESPONSE, expiry)]


def _accept_data(s, f):
    t = s.config.timings
    ack = Frame.ack(f.transmitter_addr, s.node_id, 0)
    actions = [SetTimer(RESPONSE, None), TransmitFrame(ack, t.sifs_us, t.ack_us)]
    if f.destination_addr == s.node_id:
        actions.append(DeliverPayload(f.payload_bits, f.transmitter_addr))
        return s.copy(role_state=IDLE, peer=None, response_expiry_us=None), actions
    # hold the packet and contend toward the next hop
    new = s.copy(role_state=BACKOFF, pending_payload_bits=f.payload_bits,
                 pending_destination=f.destination_addr, priority=True,
                 backoff_stage=0, retry_counter=0, backoff_counter=None,
                 peer=None, response_expiry_us=None)
    return new, actions


def receiver_step(state, event):
    '''
    Steps the receiving side of a node.

    An R-RTS addressed to an idle node is handled by where it goes:

    * destination here, or relayed by an RIS: R-CTS after SIFS, await DATA
    * elsewhere with the RIS usable: forward the R-RTS after SIFS, steer
      the RIS between the sender and the next hop, await the R-CTS
    * elsewhere without RIS: R-CTS after SIFS, receive the DATA and
      forward it as a sending node

    A reflecting relay that overhears the R-CTS of its link arms its
    RIS link timer from the duration field and stays passive until the
    timer expires. Collisions, timeouts and unexpected frames return the
    receiver to Idle and release any link.

    Parameters
    -----------
    state : :class:`NodeState`
    event : :class:`Indication`

    Returns
    --------
    state : :class:`NodeState`
    actions : list
    '''
    s = state
    kind = event.kind
    now = event.now_us
    f = event.frame

    if kind not in INDICATIONS:
        return _violation(s, event, 'unknown indication')
    if kind in (SEND, SLOT):
        return _violation(s, event, 'not a receiving indication')

    if s.role_state == IDLE:
        if kind == FRAME and f.variant == RRTS and f.receiver_addr == s.node_id:
            return _accept_rrts(s, f, now)
        return s, []

    if s.role_state == RELAY_RIS_ACTIVE:
        if kind == TIMER and event.timer == RIS_LINK:
            new = s.copy(role_state=IDLE, ris_link_timer_expiry_us=None,
                         link=None, peer=None)
            return new, [ReleaseRisLink(s.link)]
        return s, []

    if kind == BUSY:
        return _cancel_response(s)

    if s.role_state == RELAY_AWAIT_RCTS:
        if kind == FRAME and f.variant == RCTS and \
                (f.receiver_addr, f.sender_addr) == s.link:
            expiry = now + f.duration_us
            new = s.copy(role_state=RELAY_RIS_ACTIVE, ris_link_timer_expiry_us=expiry,
                         response_expiry_us=None)
            return new, [SetTimer(RESPONSE, None), SetTimer(RIS_LINK, expiry)]
        return _receiver_abort(s)

    if s.role_state in (AWAIT_DATA, RELAY_STORE_FORWARD):
        if kind == FRAME and f.variant == DATA and \
                f.receiver_addr == s.node_id and f.transmitter_addr == s.peer:
            return _accept_data(s, f)
        return _receiver_abort(s)

    return _violation(s, event, 'not a receiving state')


def node_step(state, event):
    '''
    Steps a node: overhearing NAV updates, then the sending or receiving
    side.

    A frame addressed elsewhere sets the NAV from the duration table of
    :func:`~risdcf.frame.nav_duration`, counted from the frame end. An
    overheard DATA shortens an active NAV with :func:`apply_nav_min_rule`.
    Frames that carry the node's own address as transmitter never set
    its NAV.

    Parameters
    -----------
    state : :class:`NodeState`
    event : :class:`Indication`

    Returns
    --------
    state : :class:`NodeState`
    actions : list
    '''
    s = state
    if event.kind == FRAME:
        f = event.frame
        if f.receiver_addr != s.node_id and f.origin_addr != s.node_id:
            s = _overhear(s, f, event.now_us)
    if s.role_state in SENDER_STATES or \
            (s.role_state == IDLE and event.kind == SEND):
        return sender_step(s, event)
    return receiver_step(s, event)
