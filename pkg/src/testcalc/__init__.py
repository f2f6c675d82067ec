"""testcalc: discrete-math toolkit for software testing.

Submodules:

* :mod:`testcalc.graph_core` - program graphs, circuit rank, McCabe complexity,
  basis paths, structuredness
* :mod:`testcalc.minilang` - a tiny imperative language compiled to program graphs
* :mod:`testcalc.proplogic` - propositional expressions, truth tables, entailment
* :mod:`testcalc.behaviors` - specified/programmed/tested behavior regions
* :mod:`testcalc.statechart` - hierarchical statecharts flattened to FSMs
"""

__version__ = "0.1.0"
