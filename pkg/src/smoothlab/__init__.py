"""smoothlab: perturbed-instance experiments for simplex walks, random-matrix
condition numbers, and perceptron margins."""

from . import errors, experiments, numkit, perceptron, perturb, polytope, simplex

__all__ = [
    "errors",
    "experiments",
    "numkit",
    "perceptron",
    "perturb",
    "polytope",
    "simplex",
]

__version__ = "0.1.0"
