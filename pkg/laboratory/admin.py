import json
from django.contrib import admin
from django.utils.html import format_html, escape
from django.utils.safestring import mark_safe

from .models import ScenarioRun, RunLog


@admin.register(ScenarioRun)
class ScenarioRunAdmin(admin.ModelAdmin):
    """Tùy chỉnh hiển thị cho ScenarioRun"""
    list_display = ('id', 'name', 'topic', 'display_verdict', 'seed', 'timestamp')
    list_filter = ('verdict', 'name', 'timestamp')
    search_fields = ('name', 'topic')
    readonly_fields = ('name', 'topic', 'verdict', 'seed', 'parameters', 'timestamp', 'display_transcript')
    fields = ('name', 'topic', 'verdict', 'seed', 'parameters', 'timestamp', 'display_transcript')

    @admin.display(description="Kết quả")
    def display_verdict(self, obj):
        color = '#2e7d32' if obj.verdict == 'pass' else '#c62828'
        return format_html('<b style="color: {};">{}</b>', color, obj.get_verdict_display())

    @admin.display(description="Nhật ký các bước (dạng bảng)")
    def display_transcript(self, obj):
        """
        Dựng transcript (danh sách {step, output, ok}) thành bảng HTML.
        """
        try:
            steps = obj.transcript
            if not isinstance(steps, list) or not steps:
                pretty_json = json.dumps(steps, indent=4, ensure_ascii=False)
                return mark_safe(f'<pre style="background-color: #1d1f21; color: #c5c8c6; padding: 15px; border-radius: 5px;"><code>{escape(pretty_json)}</code></pre>')

            headers = ["Bước", "Kết quả", "Kiểm tra"]
            table_style = "width:100%; border-collapse: collapse; border: 1px solid #ccc;"
            th_style = "border: 1px solid #ccc; padding: 8px; text-align: left; background-color: #f2f2f2; font-weight: bold;"
            td_style = "border: 1px solid #ccc; padding: 8px; text-align: left; vertical-align: top; font-family: monospace;"

            html = f'<table style="{table_style}"><thead><tr>'
            for header in headers:
                html += f'<th style="{th_style}">{escape(header)}</th>'
            html += '</tr></thead>'

            html += '<tbody>'
            for step in steps:
                ok = step.get('ok')
                mark = '' if ok is None else ('✔' if ok else '✘')
                html += '<tr>'
                for value in (step.get('step', ''), step.get('output', ''), mark):
                    html += f'<td style="{td_style}">{escape(value)}</td>'
                html += '</tr>'
            html += '</tbody></table>'

            return mark_safe(html)

        except Exception as e:
            return format_html('<div style="color: red;">Lỗi không xác định khi dựng bảng: {}</div>', str(e))

    def has_add_permission(self, request):
        return False


@admin.register(RunLog)
class RunLogAdmin(admin.ModelAdmin):
    list_display = ('id', 'level', 'short_message', 'timestamp')
    list_filter = ('level', 'timestamp')
    search_fields = ('message',)
    readonly_fields = ('level', 'message', 'timestamp')

    @admin.display(description="Nội dung")
    def short_message(self, obj):
        return obj.message[:120]

    def has_add_permission(self, request):
        return False
