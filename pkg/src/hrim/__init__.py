"""Toolkit for the Hardware Robot Information Model (HRIM).

Component models describe what a class of robot module must expose; the
modules in this package parse and format them, check naming and units,
generate interface files, check vendor descriptors for conformance and
simulate the runtime behavior of conforming modules.
"""

__version__ = "0.1.0"
