# modules/data_logging.py

import json
import logging
from datetime import datetime as dt
from pathlib import Path

import pandas as pd

logger = logging.getLogger(__name__)


class DataLogger:
    def __init__(self, path):
        self.path = Path(path)

    def record_outputs(self, data_dict):
        """
        Appends a dictionary of data as one row of the logger's CSV file.

        Parameters:
        - data_dict (dict): Dictionary containing data to log.
        """
        data_dict = dict(data_dict)
        data_dict['Timestamp'] = dt.now().isoformat(timespec="seconds")

        df = pd.DataFrame([data_dict])

        # Header only on the first write, so repeated runs append to the same table
        self.path.parent.mkdir(parents=True, exist_ok=True)
        write_header = not self.path.exists() or self.path.stat().st_size == 0
        df.to_csv(self.path, mode="a", header=write_header, index=False)

    def read(self):
        if not self.path.exists():
            return pd.DataFrame()
        return pd.read_csv(self.path)


def log_claim_report(report_logger, report, suite):
    """
    Logs one claim report.

    Parameters:
    - report_logger (DataLogger): Logger for the suite's CSV.
    - report (Report): The claim report.
    - suite (str): Suite name.
    """
    stats = report.search_stats or {}
    record = {
        'Suite': suite,
        'ClaimID': report.claim_id,
        'Status': report.status,
        'Computed': json.dumps(report.computed, sort_keys=True, default=str),
        'Expected': json.dumps(report.expected, sort_keys=True, default=str),
        'Nodes': stats.get('nodes', 0),
        'Refusals': stats.get('refusals', 0),
        'RuntimeMs': report.runtime_ms,
        'Note': report.note,
    }
    report_logger.record_outputs(record)


def log_search_stats(stats_logger, operation, stats, outcome):
    """
    Logs the search statistics of one CLI operation.

    Parameters:
    - stats_logger (DataLogger): Logger for search statistics.
    - operation (str): CLI verb.
    - stats (dict): Budget statistics (nodes, refusals, limit).
    - outcome (str): Short outcome label.
    """
    record = {
        'Operation': operation,
        'Outcome': outcome,
        'Nodes': stats.get('nodes', 0),
        'Refusals': stats.get('refusals', 0),
        'Limit': stats.get('limit'),
    }
    stats_logger.record_outputs(record)


def summarize_reports(reports):
    """Counts of pass / fail / refused as a one-row-per-status DataFrame."""
    df = pd.DataFrame([{'Status': r.status, 'RuntimeMs': r.runtime_ms} for r in reports],
                      columns=['Status', 'RuntimeMs'])
    return (df.groupby('Status')
              .agg(Claims=('Status', 'size'), RuntimeMs=('RuntimeMs', 'sum'))
              .reindex(['pass', 'fail', 'refused'], fill_value=0)
              .reset_index())


def log_suite_summary(summary_logger, suite, reports, exit_code):
    summary = summarize_reports(reports).set_index('Status')
    record = {
        'Suite': suite,
        'Passed': int(summary.loc['pass', 'Claims']),
        'Failed': int(summary.loc['fail', 'Claims']),
        'Refused': int(summary.loc['refused', 'Claims']),
        'RuntimeMs': int(summary['RuntimeMs'].sum()),
        'ExitCode': exit_code,
    }
    summary_logger.record_outputs(record)
    return record


def write_json_report(path, suite, reports):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"suite": suite, "reports": [r.model_dump(mode="json") for r in reports]}
    path.write_text(json.dumps(payload, indent=2, sort_keys=False, default=str))
    logger.info("wrote %d reports to %s", len(reports), path)
    return path
