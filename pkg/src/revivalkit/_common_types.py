"""Common types used throughout the library."""
import typing

import numpy as np
import numpy.typing as npt

RealArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]
IntArray = npt.NDArray[np.int64]

#: Anything numpy can turn into an array of numbers
ArrayLike = npt.ArrayLike

Sites = typing.Tuple[int, ...]


def frozen_array(value: ArrayLike, dtype: typing.Any = None) -> typing.Any:
    """Copy ``value`` into a read-only numpy array."""
    array = np.array(value, dtype=dtype)
    array.setflags(write=False)
    return array
