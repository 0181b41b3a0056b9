import unittest

from q2d2.tests import (
    test_analytics,
    test_baselines,
    test_cli,
    test_codebook,
    test_grid,
    test_quantizer,
    test_token_stream,
    test_toy,
)

suite = unittest.TestSuite(
    [
        test_grid.suite,
        test_quantizer.suite,
        test_codebook.suite,
        test_baselines.suite,
        test_analytics.suite,
        test_token_stream.suite,
        test_toy.suite,
        test_cli.suite,
    ]
)


def load_tests(loader, tests, pattern):
    return suite


if __name__ == "__main__":
    unittest.TextTestRunner(verbosity=2).run(suite)
