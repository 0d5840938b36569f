'''
.. currentmodule:: risdcf.topology
========================================
topology (:mod:`risdcf.topology`)
========================================

Node layouts for the simulator.

A topology is a relay path N0, N1, ..., Nm plus the nodes contending
around it. L first-hop contenders (N0 among them) share the channel
toward N1 and can all hear one another. Every later path node Ni has
K-1 interferers around it that only it can hear. Nodes two hops apart
are hidden from each other unless an RIS bridges them.

Topology Class
================
.. autosummary::
   :toctree: generated/

   Topology

'''
from . import constants as const
from .protocol import NodeState

SOURCE = 'source'
RELAY = 'relay'
DESTINATION = 'destination'
INTERFERER = 'interferer'
ROLES = (SOURCE, RELAY, DESTINATION, INTERFERER)

PATH_BASE = 0x020000000000
SOURCE_BASE = 0x040000000000
INTERFERER_BASE = 0x060000000000


class TopologyError(ValueError):
    pass


class Topology(object):
    '''
    Nodes, reachability and static routes of a simulated network.

    Use :func:`dual_hop` or :func:`chain` rather than the initializer.

    Parameters
    ------------
    path : list of int
        addresses N0 ... Nm; N0 originates, Nm is the final destination
    sources : list of int
        first-hop contenders, N0 first
    interferers : dict
        path node -> list of its interferers
    adjacency : dict
        node -> set of nodes that hear it
    routing : dict
        node -> {destination: next hop}
    ris_nodes : set
        path nodes with a usable RIS
    interferer_traffic : bool
        interferers run full exchanges toward their path node instead of
        transmitting only alongside reservations toward it
    '''
    def __init__(self, path, sources, interferers, adjacency, routing,
                 ris_nodes=(), interferer_traffic=False):
        self.path = list(path)
        self.sources = list(sources)
        self.interferers = dict((k, list(v)) for k, v in interferers.items())
        self.adjacency = dict((k, frozenset(v)) for k, v in adjacency.items())
        self.routing = dict((k, dict(v)) for k, v in routing.items())
        self.ris_nodes = frozenset(ris_nodes)
        self.interferer_traffic = bool(interferer_traffic)
        self._validate()

    @classmethod
    def chain(cls, m_hops=const.NUM_HOPS, L=const.NUM_HOP1_CONTENDERS,
              K=const.NUM_HOP2_CONTENDERS, ris_available=True,
              interferer_traffic=False):
        '''
        An m-hop relay chain.

        With `ris_available`, N1, N3, ... reflect, so hops pair up into
        RIS-assisted dual hops and an odd last hop goes direct.

        Parameters
        -----------
        m_hops : int
            number of hops, >= 1
        L : int
            first-hop contenders, the source included
        K : int
            contenders at every later hop, the forwarding node included
        ris_available : bool
        interferer_traffic : bool
        '''
        for name, v in (('m_hops', m_hops), ('L', L), ('K', K)):
            if int(v) != v or v < 1:
                raise TopologyError('%s must be an integer >= 1, got %s' % (name, v))

        path = [PATH_BASE + i for i in range(m_hops + 1)]
        dest = path[-1]
        sources = [path[0]] + [SOURCE_BASE + j for j in range(1, L)]
        adjacency = dict((n, set()) for n in path + sources)

        def link(a, b):
            adjacency.setdefault(a, set()).add(b)
            adjacency.setdefault(b, set()).add(a)

        for a, b in zip(path[:-1], path[1:]):
            link(a, b)
        for j, a in enumerate(sources):
            link(a, path[1])
            for b in sources[j + 1:]:
                link(a, b)

        interferers = {}
        for i in range(2, m_hops + 1):
            group = [INTERFERER_BASE | (i << 24) | j for j in range(1, K)]
            interferers[path[i]] = group
            for j, a in enumerate(group):
                link(a, path[i])
                for b in group[j + 1:]:
                    link(a, b)

        routing = dict((a, {dest: path[1]}) for a in sources)
        for i in range(1, m_hops):
            routing[path[i]] = {dest: path[i + 1]}
        for receiver, group in interferers.items():
            for a in group:
                routing[a] = {receiver: receiver}

        ris_nodes = set()
        if ris_available:
            ris_nodes = set(path[i] for i in range(1, m_hops, 2))
        return cls(path, sources, interferers, adjacency, routing, ris_nodes,
                   interferer_traffic)

    @classmethod
    def dual_hop(cls, L=const.NUM_HOP1_CONTENDERS, K=const.NUM_HOP2_CONTENDERS,
                 ris_available=True, interferer_traffic=False):
        '''
        Source, relay and destination with L contenders at the relay and
        K at the destination.
        '''
        return cls.chain(2, L, K, ris_available, interferer_traffic)

    def _validate(self):
        if len(self.path) < 2:
            raise TopologyError('a path needs at least two nodes')
        if not self.sources or self.sources[0] != self.path[0]:
            raise TopologyError('the first source must be the path origin')
        nodes = set(self.adjacency)
        for a, heard in self.adjacency.items():
            if a in heard:
                raise TopologyError('node %x is adjacent to itself' % a)
            for b in heard:
                if b not in nodes or a not in self.adjacency[b]:
                    raise TopologyError('adjacency of %x and %x is not symmetric' % (a, b))
        for a in self.sources:
            if self.first_receiver not in self.adjacency.get(a, ()):
                raise TopologyError('source %x cannot reach %x' % (a, self.first_receiver))
        for receiver, group in self.interferers.items():
            if receiver not in self.path[1:]:
                raise TopologyError('interferers attached to %x, which is not on the path' % receiver)
            for a in group:
                if receiver not in self.adjacency.get(a, ()):
                    raise TopologyError('interferer %x cannot reach %x' % (a, receiver))
        for a, table in self.routing.items():
            for dest, hop in table.items():
                if hop not in self.adjacency.get(a, ()):
                    raise TopologyError('route of %x toward %x uses non-neighbor %x' % (a, dest, hop))
        if not self.ris_nodes <= set(self.path[1:-1]):
            raise TopologyError('only intermediate path nodes can reflect')

    def __repr__(self):
        L, K = self.contender_counts
        return 'Topology(m=%i, L=%i, K=%i, ris=%s)' % (self.m_hops, L, K,
                                                      bool(self.ris_nodes))

    def __len__(self):
        return len(self.adjacency)

    @property
    def m_hops(self):
        return len(self.path) - 1

    @property
    def contender_counts(self):
        '''
        (L, K)
        '''
        K = 1 + max([len(v) for v in self.interferers.values()] or [0])
        return len(self.sources), K

    @property
    def source(self):
        return self.path[0]

    @property
    def destination(self):
        return self.path[-1]

    @property
    def first_receiver(self):
        '''
        N1, the node the first-hop contenders compete for
        '''
        return self.path[1]

    @property
    def relays(self):
        return self.path[1:-1]

    @property
    def nodes(self):
        return sorted(self.adjacency)

    @property
    def all_interferers(self):
        return [a for g in self.interferers.values() for a in g]

    def role(self, node):
        if node in self.sources:
            return SOURCE
        if node == self.destination:
            return DESTINATION
        if node in self.relays:
            return RELAY
        if node in self.all_interferers:
            return INTERFERER
        raise TopologyError('unknown node %x' % node)

    def neighbors(self, node):
        return self.adjacency[node]

    def initial_states(self, config, ris_enabled=True):
        '''
        Idle :class:`~risdcf.protocol.NodeState` of every node.

        Parameters
        -----------
        config : :class:`~risdcf.protocol.ProtocolConfig`
        ris_enabled : bool
            False turns every RIS off, e.g. when the link efficiency is
            below the switching threshold

        Returns
        --------
        states : dict
            address -> NodeState
        '''
        return dict(
            (a, NodeState(a, config, routing=self.routing.get(a, {}),
                          ris_available=ris_enabled and a in self.ris_nodes))
            for a in self.nodes)
