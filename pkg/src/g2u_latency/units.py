"""dB / linear conversions."""
import numpy as np


def db_to_lin(db):
    return np.power(10.0, np.asarray(db, dtype=float) / 10.0)


def lin_to_db(x):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(x, dtype=float))


def dbm_to_w(dbm):
    return np.power(10.0, (np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def w_to_dbm(w):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(w, dtype=float)) + 30.0
