"""Second-price auctions with costly, publicly visible deposits."""

__version__ = "0.1.0"
