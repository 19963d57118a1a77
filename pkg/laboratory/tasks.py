import logging
from datetime import timedelta

from celery import group, shared_task
from django.utils import timezone

from worker.quantale_lab.LabCommon import UnknownScenario
from worker.quantale_lab.ScenarioRunner import list_scenarios, run_scenario
from .models import RunLog, ScenarioRun

# Lấy ra logger đã được cấu hình sẵn bởi Django/Celery
logger = logging.getLogger(__name__)


@shared_task(name="tasks.run_scenario")
def run_scenario_task(name, parameters=None):
    """
    Chạy một kịch bản và lưu báo cáo vào ScenarioRun.
    """
    logger.info(f"Bắt đầu tác vụ chạy kịch bản '{name}'...")
    try:
        report = run_scenario(name, parameters)
        run = ScenarioRun.from_report(report)
        if not report.passed:
            logger.warning(f"Kịch bản '{name}' không đạt (ScenarioRun #{run.pk}).")
        else:
            logger.info(f"Kịch bản '{name}' đạt (ScenarioRun #{run.pk}).")
        return f"{name}: {report.verdict}"
    except UnknownScenario as e:
        logger.error(f"Không tìm thấy kịch bản: {e}")
        return f"Unknown scenario: {name}"
    except Exception as e:
        logger.error(f"Đã xảy ra lỗi khi chạy kịch bản '{name}': {e}", exc_info=True)
        return f"Scenario {name} failed with error: {e}"


@shared_task(name="tasks.run_all_scenarios")
def run_all_scenarios_task():
    """
    Tác vụ định kỳ (django-celery-beat): gửi mọi kịch bản thành các tác vụ con chạy song song.
    """
    names = [name for name, _ in list_scenarios()]
    logger.info(f"Gửi {len(names)} kịch bản vào hàng đợi: {', '.join(names)}")
    try:
        group(run_scenario_task.s(name) for name in names).apply_async()
        return f"Dispatched {len(names)} scenarios."
    except Exception as e:
        logger.error(f"Không gửi được các kịch bản: {e}", exc_info=True)
        return f"Dispatch failed: {e}"


@shared_task(name="tasks.cleanup_old_runs")
def cleanup_old_runs_task(days_to_keep=30):
    """
    Tác vụ Celery để dọn dẹp các lần chạy và log cũ hơn days_to_keep ngày.
    """
    cutoff_date = timezone.now() - timedelta(days=days_to_keep)
    logger.info(f"Bắt đầu tác vụ dọn dẹp. Xóa các bản ghi cũ hơn ngày: {cutoff_date.strftime('%Y-%m-%d')}")

    try:
        runs_deleted, _ = ScenarioRun.objects.filter(timestamp__lt=cutoff_date).delete()
        logger.info(f"Đã xóa {runs_deleted} bản ghi ScenarioRun cũ.")

        logs_deleted, _ = RunLog.objects.filter(timestamp__lt=cutoff_date).delete()
        logger.info(f"Đã xóa {logs_deleted} bản ghi RunLog cũ.")

        return f"Cleanup successful. Deleted: {runs_deleted} runs, {logs_deleted} logs."
    except Exception as e:
        logger.error(f"Tác vụ dọn dẹp thất bại: {e}", exc_info=True)
        return f"Cleanup failed: {e}"
