"""Lawless - 对称性优先的量子力学数值工具箱"""

__version__ = "0.1.0"
