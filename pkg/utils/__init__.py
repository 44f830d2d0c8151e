# Utils package for the Moebius band certificate toolkit

__version__ = "1.0.1"
