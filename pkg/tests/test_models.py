import unittest

from sqlalchemy import create_engine, select
from sqlalchemy.exc import IntegrityError
from sqlalchemy.orm import sessionmaker

from dtcsim.models import Base, SimulationRun


def _run(**changes) -> SimulationRun:
    values = dict(
        command="gate",
        gate_kind="sqiswap",
        config_hash="0123456789ab",
        gate_time_ns=24.0,
        angle=0.785,
        avg_fidelity=0.9999,
        total_leakage=1e-5,
        leakage=[0.0, 4e-6, 2e-6, 4e-6],
        report={"gate": "sqiswap"},
    )
    values.update(changes)
    return SimulationRun(**values)


class DBTestCase(unittest.TestCase):
    def setUp(self):
        # In-memory SQLite for isolation
        self.engine = create_engine("sqlite+pysqlite:///:memory:", future=True)
        Base.metadata.create_all(self.engine)
        self.Session = sessionmaker(
            bind=self.engine, future=True, expire_on_commit=False
        )

    def tearDown(self):
        self.engine.dispose()

    def test_defaults_and_json_columns(self):
        with self.Session() as session:
            session.add(_run())
            session.commit()

            run = session.scalars(select(SimulationRun)).one()
            self.assertIsNotNone(run.id)
            self.assertIsNotNone(run.created_at)
            self.assertIsNone(run.target_angle)
            self.assertEqual(run.leakage, [0.0, 4e-6, 2e-6, 4e-6])
            self.assertEqual(run.report["gate"], "sqiswap")

    def test_key_is_unique(self):
        with self.Session() as session:
            session.add(_run())
            session.commit()
            session.add(_run(angle=0.5))
            with self.assertRaises(IntegrityError):
                session.commit()
            session.rollback()

    def test_same_time_different_command_is_allowed(self):
        with self.Session() as session:
            session.add_all([_run(), _run(command="calibrate", target_angle=0.785)])
            session.commit()
            self.assertEqual(len(session.scalars(select(SimulationRun)).all()), 2)

    def test_to_json(self):
        with self.Session() as session:
            session.add(_run(gate_kind="cz", gate_time_ns=18.0))
            session.commit()
            data = session.scalars(select(SimulationRun)).one().to_json()
            self.assertEqual(data["gate_kind"], "cz")
            self.assertTrue(data["created_at"].endswith("+00:00"))
            self.assertEqual(data["leakage"][1], 4e-6)
            self.assertNotIn("report", data)

    def test_repr(self):
        self.assertEqual(repr(_run()), "<SimulationRun gate/sqiswap T=24.0 F=0.999900>")


if __name__ == "__main__":
    unittest.main()
