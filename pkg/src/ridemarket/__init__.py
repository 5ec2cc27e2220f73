"""ridemarket: day-to-day microsimulation of a two-sided ride-sourcing market.

A pool of travelers and a pool of drivers gradually become aware of a
ride-sourcing platform, try it out, learn from their experiences, talk to
each other, and decide every day whether to participate.  The platform
executes a staged market-entry strategy (marketing, discounts, commission
changes) whose consequences emerge from the agent interactions.
"""

__version__ = "0.1.0"
