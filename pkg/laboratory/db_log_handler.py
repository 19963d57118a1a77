import logging


class DatabaseLogHandler(logging.Handler):
    """Ghi log của các tác vụ Celery vào bảng RunLog."""

    def emit(self, record):
        from .models import RunLog
        try:
            RunLog.objects.create(
                level=record.levelname,
                message=self.format(record)
            )
        except Exception:
            # database chưa sẵn sàng (migrate, test runner) thì bỏ qua
            pass
