"""Test stand-in for the execution runtime of generated components.

Each tick: root inputs are read from the bundle, port values are forwarded
along connectors, root outputs are recorded, every atomic component computes
from current values, and next values become current.
"""
import argparse
import json
import sys


class Port:
    def __init__(self, name):
        self.rt_name = name
        self.rt_current = None
        self.rt_next = None

    def getCurrentValue(self):
        return self.rt_current

    def setCurrentValue(self, value):
        self.rt_current = value

    def setNextValue(self, value):
        self.rt_next = value


class Component:
    IN_PORTS = ()
    OUT_PORTS = ()

    def __init__(self, name):
        self.rt_name = name
        for p in self.IN_PORTS + self.OUT_PORTS:
            setattr(self, "_" + p, Port(p))
        self.init()

    def init(self):
        pass

    def compute(self):
        pass

    def rt_port(self, name):
        return getattr(self, "_" + name)

    def rt_atomics(self):
        return [self]

    def rt_links(self):
        return []

    def rt_forwarded(self):
        return [self.rt_port(p) for p in self.IN_PORTS]


class Composed(Component):
    def __init__(self, name):
        self.rt_children = []
        self.rt_connections = []
        super().__init__(name)
        self.build()

    def build(self):
        pass

    def add(self, child):
        self.rt_children.append(child)
        return child

    def connect(self, source, targets):
        self.rt_connections.append((source, list(targets)))

    def rt_atomics(self):
        return [a for c in self.rt_children for a in c.rt_atomics()]

    def rt_links(self):
        return self.rt_connections + [l for c in self.rt_children for l in c.rt_links()]

    def rt_forwarded(self):
        own = [self.rt_port(p) for p in self.IN_PORTS + self.OUT_PORTS]
        return own + [p for c in self.rt_children for p in c.rt_forwarded()]


def create(type_name, cls, instance):
    return cls(instance)


def clamp(value, lo, hi):
    return max(lo, min(hi, value))


def run(root, inputs, ticks):
    links = root.rt_links()
    forwarded = root.rt_forwarded()
    outputs = {p: [] for p in sorted(root.OUT_PORTS)}
    for tick in range(ticks):
        for port in forwarded:
            port.rt_current = None
        for p in root.IN_PORTS:
            root.rt_port(p).rt_current = inputs[p][tick]
        # forwarding chains are at most as long as the list of links
        for _ in range(len(links)):
            for source, targets in links:
                for target in targets:
                    target.rt_current = source.rt_current
        for p in outputs:
            outputs[p].append(root.rt_port(p).rt_current)
        atomics = root.rt_atomics()
        for a in atomics:
            a.compute()
        for a in atomics:
            for p in a.OUT_PORTS:
                port = a.rt_port(p)
                port.rt_current = port.rt_next
                port.rt_next = None
    return {"ticks": ticks, "ports": outputs}


def main(components, argv):
    parser = argparse.ArgumentParser(prog="main.py")
    parser.add_argument("--root", required=True)
    parser.add_argument("--inputs", required=True)
    parser.add_argument("--ticks", type=int, required=True)
    parser.add_argument("--out")
    args = parser.parse_args(argv)
    if args.root not in components:
        print(f"unknown component {args.root}", file=sys.stderr)
        return 2
    with open(args.inputs) as f:
        bundle = json.load(f)
    root = create(args.root, components[args.root], args.root)
    text = json.dumps(run(root, bundle["ports"], args.ticks), indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0
