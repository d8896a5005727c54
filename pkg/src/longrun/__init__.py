"""longrun: long-run equilibrium analysis for monthly time series.

The package covers the full arc of a long-run study: ingest monthly
data, extract a stochastic-volatility trend and its uncertainty from
inflation, test levels for unit roots, test for cointegration allowing
a single structural break, fit the implied long-run regressions, model
short-run adjustment (error correction or a VAR in differences), and
check parameter stability with recursive residuals.
"""

__version__ = "0.1.0"
