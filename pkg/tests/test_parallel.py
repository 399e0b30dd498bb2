from brickqec.parallel import WORKERS_ENV, default_workers, ordered_map


def _square(x):
    return x * x


def test_default_workers_reads_environment(monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, "3")
    assert default_workers() == 3
    monkeypatch.setenv(WORKERS_ENV, "junk")
    assert default_workers() == 1
    monkeypatch.delenv(WORKERS_ENV)
    assert default_workers() == 1


def test_ordered_map_keeps_input_order():
    items = list(range(40))
    assert ordered_map(_square, items, workers=1) == ordered_map(_square, items, workers=3)
    assert ordered_map(_square, items, workers=3) == [x * x for x in items]
