"""Back-and-forth games, linear-order algebra, and limit learners.

The package is organized in layers:

    orderalg   symbolic linear-order expressions and rewriting
    core       vocabularies, snapshots, descriptors, presentations
    bfgame     bounded back-and-forth relations and their oracles
    trees      finite trees, interleaving, Kleene-Brouwer linearization
    learn      sentence evaluation and learners over presentations
    sessions   end-to-end learning runs, checks, and experiments
    formats    JSON encodings of the domain objects
    cli        command line front end
"""

__version__ = "0.1.0"
