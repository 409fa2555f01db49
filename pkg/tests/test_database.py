"""Tests for the SQLite result store"""

import json
import threading

from src.models import ResultsDatabase, init_db


def make_run(**overrides):
    values = {
        "command": "run",
        "kind": "lcd",
        "size": 4,
        "h_xf": 2.0,
        "h_zi": 1.0,
        "J_f": 1.0,
        "tau": 1.0,
        "boundary": "periodic",
        "lambda_f": 0.6,
        "final_fidelity": 0.99,
        "spec_hash": "abc",
        "spec_json": "{}",
    }
    values.update(overrides)
    return values


def test_add_run_drops_unknown_keys(tmp_path):
    db = ResultsDatabase(str(tmp_path / "runs.db"))
    try:
        record = db.add_run(**make_run(not_a_column=5))
        assert record.id is not None
        assert not hasattr(record, "not_a_column")
        stored = db.get_runs()
        assert len(stored) == 1
        assert stored[0].final_fidelity == 0.99
        assert stored[0].pre_lu_fidelity is None
        assert stored[0].timestamp is not None
    finally:
        db.close()


def test_get_runs_filters_and_limit(tmp_path):
    db = ResultsDatabase(str(tmp_path / "runs.db"))
    try:
        for i in range(3):
            db.add_run(**make_run(size=4 + i))
        db.add_run(**make_run(kind="adiabatic", lambda_f=0.0))
        db.add_run(**make_run(command="scaling", size=10))

        assert len(db.get_runs()) == 5
        assert [r.kind for r in db.get_runs(kind="adiabatic")] == ["adiabatic"]
        assert [r.size for r in db.get_runs(command="scaling")] == [10]
        lcd_runs = db.get_runs(kind="lcd", command="run")
        assert [r.size for r in lcd_runs] == [4, 5, 6]
        assert [r.size for r in db.get_runs(kind="lcd", command="run", limit=2)] == [5, 6]
    finally:
        db.close()


def test_scaling_fit_storage(tmp_path):
    db = ResultsDatabase(str(tmp_path / "runs.db"))
    try:
        db.add_scaling_fit("lcd", 2.0, c=0.03, a=-0.01, sizes=[4, 6, 8], residual_norm=1e-3)
        db.add_scaling_fit("adiabatic", 2.0, c=1.2, a=0.5, sizes=[4, 6], partial=True)
        fits = db.get_scaling_fits()
        assert [f.kind for f in fits] == ["lcd", "adiabatic"]
        assert json.loads(fits[0].sizes) == [4, 6, 8]
        assert fits[0].partial == 0
        assert fits[1].partial == 1
        only = db.get_scaling_fits(kind="adiabatic")
        assert len(only) == 1
        assert only[0].c == 1.2
    finally:
        db.close()


def test_concurrent_writes(tmp_path):
    db = ResultsDatabase(str(tmp_path / "runs.db"))

    def writer(offset):
        for i in range(5):
            db.add_run(**make_run(size=offset * 10 + i))

    try:
        threads = [threading.Thread(target=writer, args=(n,)) for n in range(4)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        assert len(db.get_runs()) == 20
    finally:
        db.close()


def test_init_db_creates_parent_directory(tmp_path):
    path = tmp_path / "nested" / "dir" / "runs.db"
    db = init_db(str(path))
    try:
        assert path.parent.is_dir()
        db.add_run(**make_run())
        assert path.exists()
    finally:
        db.close()
