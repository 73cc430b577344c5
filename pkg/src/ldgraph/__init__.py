"""Large deviations of random colorings on bounded-degree graphs, at desk scale."""

__version__ = "0.1.0"
