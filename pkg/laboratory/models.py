from django.db import models


class ScenarioRun(models.Model):
    VERDICT_CHOICES = [
        ('pass', 'Đạt'),
        ('fail', 'Không đạt'),
    ]

    name = models.CharField(max_length=100, verbose_name="Kịch bản")
    topic = models.CharField(max_length=200, blank=True, verbose_name="Chủ đề")
    verdict = models.CharField(max_length=10, choices=VERDICT_CHOICES, verbose_name="Kết quả")
    transcript = models.JSONField(default=list, verbose_name="Nhật ký các bước")
    parameters = models.JSONField(default=dict, blank=True, verbose_name="Tham số")
    seed = models.BigIntegerField(verbose_name="Seed")
    timestamp = models.DateTimeField(auto_now_add=True, verbose_name="Thời gian chạy")

    def __str__(self):
        return f"{self.name} [{self.verdict}] lúc {self.timestamp.strftime('%Y-%m-%d %H:%M:%S')}"

    @classmethod
    def from_report(cls, report) -> 'ScenarioRun':
        """Lưu một ScenarioRunner.Report vào database."""
        data = report.as_dict()
        return cls.objects.create(
            name=data['name'],
            topic=data['topic'],
            verdict=data['verdict'],
            transcript=data['transcript'],
            parameters=data['parameters'],
            seed=data['seed'],
        )

    class Meta:
        verbose_name = "Lần chạy kịch bản"
        verbose_name_plural = "Các lần chạy kịch bản"
        ordering = ['-timestamp']


class RunLog(models.Model):
    level = models.CharField(max_length=20, verbose_name="Mức độ")
    message = models.TextField(verbose_name="Nội dung")
    timestamp = models.DateTimeField(auto_now_add=True, verbose_name="Thời gian")

    def __str__(self):
        return f"[{self.level}] {self.message[:80]}"

    class Meta:
        verbose_name = "Log tác vụ"
        verbose_name_plural = "Log các tác vụ"
        ordering = ['-timestamp']
