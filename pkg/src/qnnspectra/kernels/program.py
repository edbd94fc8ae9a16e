"""Flat integer encoding of a gate program shared by both kernel backends.

Each row of ``ops`` is ``(kind, a, b, slot)``:

* RZ / RY: ``a`` is the qubit, ``slot`` the parameter index.
* CNOT: ``a`` control, ``b`` target.
* DIAG: ``a`` indexes a row of the ``diag`` table (full-basis phase
  angles per unit of data), ``slot`` the data index.
"""
KIND_RZ = 0
KIND_RY = 1
KIND_CNOT = 2
KIND_DIAG = 3
