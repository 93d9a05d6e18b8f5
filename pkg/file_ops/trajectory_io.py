from pathlib import Path
from typing import IO, Optional, Union
import csv
import io
import json

import numpy as np

from common.enums import OutputFormat
from common.models import TrajectoryMetadata
from core.app_config import OutputConfig
from mechanics.integrator import Trajectory


def _number(value: float) -> str:
    # repr is the shortest decimal that round-trips
    return repr(float(value))


class TrajectoryWriter:
    """
    Trajectory export. CSV holds one row per accepted sample in the column
    order of OutputConfig.CSV_COLUMNS; JSON wraps the same records with a
    metadata header.
    """
    @staticmethod
    def rows(tr: Trajectory) -> list[list[float]]:
        return [
            [tr.taus[i], *tr.states[i], tr.first_integral[i], tr.pirani[i], tr.residual_norm[i]]
            for i in range(len(tr))
        ]

    @staticmethod
    def to_csv(tr: Trajectory) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(OutputConfig.CSV_COLUMNS)
        for row in TrajectoryWriter.rows(tr):
            writer.writerow([_number(v) for v in row])
        return buffer.getvalue()

    @staticmethod
    def to_json(tr: Trajectory, metadata: TrajectoryMetadata) -> str:
        samples = [
            dict(zip(OutputConfig.CSV_COLUMNS, (float(v) for v in row)))
            for row in TrajectoryWriter.rows(tr)
        ]
        document = {'metadata': metadata.model_dump(mode='json'), 'samples': samples}
        return json.dumps(document, indent=2) + '\n'

    @staticmethod
    def write(tr: Trajectory, fmt: OutputFormat, metadata: TrajectoryMetadata,
              path: Optional[Union[str, Path]] = None, stream: Optional[IO[str]] = None) -> str:
        text = TrajectoryWriter.to_csv(tr) if fmt is OutputFormat.CSV else TrajectoryWriter.to_json(tr, metadata)
        if path is not None:
            Path(path).write_text(text, encoding='utf-8')
        elif stream is not None:
            stream.write(text)
        return text


class TrajectoryReader:
    @staticmethod
    def read_csv(path: Union[str, Path]) -> np.ndarray:
        '''Rows of a trajectory CSV as a float array, header checked.'''
        with open(path, newline='', encoding='utf-8') as f:
            reader = csv.reader(f)
            header = next(reader)
            if header != OutputConfig.CSV_COLUMNS:
                raise ValueError(f'unexpected trajectory header: {header}')
            return np.array([[float(v) for v in row] for row in reader])
