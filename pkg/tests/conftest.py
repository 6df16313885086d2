import numpy as np
import pytest

from scalecorr.panel import ReturnPanel


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_return_panel(matrix, tickers=None):
    """Wrap a [time x stock] matrix as a ReturnPanel with synthetic dates."""
    import datetime as dt

    matrix = np.asarray(matrix, dtype=float)
    T, N = matrix.shape
    tickers = tickers or [f"S{i:04d}" for i in range(N)]
    dates = [dt.date(2000, 1, 3) + dt.timedelta(days=i) for i in range(T)]
    return ReturnPanel(dates=dates, tickers=tickers, returns=matrix)


PRICE_FIXTURE = """\
AAA,2020-01-03,102
AAA,2020-01-01,100
AAA,2020-01-02,101
BBB,2020-01-01,200
BBB,2020-01-02,201
BBB,2020-01-03,202
"""
