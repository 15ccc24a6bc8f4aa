import numpy as np
import pytest

from admcurve import cds_quotes, ois_quotes

# USD OIS par rates, 31 May 2013 (percent)
OIS_MATURITIES = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 30, 40]
OIS_RATES_PCT = [0.0720, 0.1530, 0.2870, 0.4540, 0.6390, 0.8210, 0.9930,
                 1.1570, 1.3090, 1.4470, 1.9300, 2.1160, 2.1820, 2.2090]
OIS_RATES = [r / 100.0 for r in OIS_RATES_PCT]

# AIG CDS spreads, 17 Dec 2007 (basis points), quarterly premiums
CDS_MATURITIES = [3, 5, 7, 10]
CDS_SPREADS_BP = [58, 54, 52, 49]
CDS_SPREADS = [s / 1e4 for s in CDS_SPREADS_BP]
CDS_RECOVERY = 0.40
CDS_FLAT_RATE = 0.03


@pytest.fixture(scope="session")
def ois_strip_2013():
    return ois_quotes(OIS_MATURITIES, OIS_RATES)


@pytest.fixture(scope="session")
def aig_cds_strip_2007():
    return cds_quotes(CDS_MATURITIES, CDS_SPREADS, recovery=CDS_RECOVERY)


@pytest.fixture
def rng():
    return np.random.default_rng(20130531)
